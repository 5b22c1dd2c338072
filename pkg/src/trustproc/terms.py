"""RDF terms and quads.

IRIs are canonicalized on construction, so two ``Iri`` values compare equal
exactly when their canonical forms are byte-identical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

__all__ = [
    "BlankNode",
    "InvalidIri",
    "Iri",
    "Literal",
    "Quad",
    "Term",
    "canonicalize_iri",
    "escape_string",
    "term_to_nquads",
    "quad_to_nquads",
]

_SCHEME_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")
# Whitespace and angle brackets are forbidden outright; the rest would break
# N-Quads serialization of the IRI.
_FORBIDDEN = frozenset('<>"{}|^`\\')
_LANG_RE = re.compile(r"[A-Za-z]+(-[A-Za-z0-9]+)*")


class InvalidIri(ValueError):
    """Raised when a string cannot be used as an absolute IRI."""

    def __init__(self, raw: str, position: int, reason: str):
        super().__init__(f"invalid IRI {raw!r} at position {position}: {reason}")
        self.raw = raw
        self.position = position
        self.reason = reason


@lru_cache(maxsize=65536)
def _canonical(raw: str) -> str:
    lead = len(raw) - len(raw.lstrip())
    text = raw.strip()
    if not text:
        raise InvalidIri(raw, 0, "empty")
    for i, ch in enumerate(text):
        if ch.isspace() or ord(ch) < 0x20 or ch in _FORBIDDEN:
            raise InvalidIri(raw, lead + i, f"forbidden character {ch!r}")
    m = _SCHEME_RE.match(text)
    if m is None:
        colon = text.find(":")
        raise InvalidIri(raw, lead + max(colon, 0), "missing or malformed scheme")
    scheme = m.group(0).lower()
    rest = text[m.end():]
    if not rest.startswith("//"):
        return scheme + rest
    end = len(rest)
    for sep in "/?#":
        j = rest.find(sep, 2)
        if j != -1:
            end = min(end, j)
    authority, tail = rest[2:end], rest[end:]
    userinfo, at, hostport = authority.rpartition("@")
    return f"{scheme}//{userinfo}{at}{hostport.lower()}{tail}"


def canonicalize_iri(raw: str) -> Iri:
    """Trim, lowercase scheme and host, and validate ``raw``."""
    return Iri(raw)


@dataclass(frozen=True, slots=True, order=True)
class Iri:
    value: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", _canonical(self.value))

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __post_init__(self) -> None:
        if not self.label or not all(c.isalnum() or c in "_-." for c in self.label):
            raise ValueError(f"invalid blank node label {self.label!r}")

    def __str__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: Iri | None = None
    language: str | None = None

    def __post_init__(self) -> None:
        if self.datatype is not None and self.language is not None:
            raise ValueError("a literal carries a datatype or a language tag, not both")
        if self.language is not None:
            if not _LANG_RE.fullmatch(self.language):
                raise ValueError(f"invalid language tag {self.language!r}")
            object.__setattr__(self, "language", self.language.lower())

    def __str__(self) -> str:
        return term_to_nquads(self)


Term = Union[Iri, BlankNode, Literal]


@dataclass(frozen=True, slots=True)
class Quad:
    subject: Iri | BlankNode
    predicate: Iri
    object: Term
    graph: Iri

    def __post_init__(self) -> None:
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise TypeError("quad subject must be an IRI or blank node")
        if not isinstance(self.predicate, Iri):
            raise TypeError("quad predicate must be an IRI")
        if not isinstance(self.object, (Iri, BlankNode, Literal)):
            raise TypeError("quad object must be an RDF term")
        if not isinstance(self.graph, Iri):
            raise TypeError("quad graph name must be an IRI")

    def __str__(self) -> str:
        return quad_to_nquads(self)


_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def escape_string(s: str) -> str:
    out = []
    for ch in s:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def term_to_nquads(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    body = f'"{escape_string(term.lexical)}"'
    if term.datatype is not None:
        return f"{body}^^<{term.datatype.value}>"
    if term.language is not None:
        return f"{body}@{term.language}"
    return body


def quad_to_nquads(q: Quad) -> str:
    return (
        f"{term_to_nquads(q.subject)} {term_to_nquads(q.predicate)} "
        f"{term_to_nquads(q.object)} {term_to_nquads(q.graph)} ."
    )
