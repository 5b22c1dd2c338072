"""Line-oriented N-Quads reader and writer.

Supported: IRIs, blank nodes, and literals with an optional datatype or
language tag; one quad per line; ``#`` comments. Every statement must name
its graph, since the store holds named graphs only.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

from .terms import BlankNode, InvalidIri, Iri, Literal, Quad, Term, quad_to_nquads

__all__ = ["DocumentSyntaxError", "parse_nquads", "serialize_nquads"]


class DocumentSyntaxError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


_SIMPLE_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_PN_CHARS = frozenset("_-.")


class _LineReader:
    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str, pos: int | None = None) -> DocumentSyntaxError:
        return DocumentSyntaxError(self.lineno, (self.pos if pos is None else pos) + 1, message)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.peek() or "end of line"
            raise self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def uchar(self) -> str:
        # positioned just after the backslash
        kind = self.peek()
        width = {"u": 4, "U": 8}.get(kind)
        if width is None:
            raise self.error(f"invalid escape \\{kind}")
        digits = self.text[self.pos + 1 : self.pos + 1 + width]
        if len(digits) != width or any(c not in "0123456789abcdefABCDEF" for c in digits):
            raise self.error("truncated unicode escape")
        code = int(digits, 16)
        if code > 0x10FFFF or 0xD800 <= code <= 0xDFFF:
            raise self.error("escape is not a unicode scalar value")
        self.pos += 1 + width
        return chr(code)

    def iri(self) -> Iri:
        start = self.pos
        self.expect("<")
        chars = []
        while True:
            ch = self.peek()
            if ch == "":
                raise self.error("unterminated IRI", start)
            self.pos += 1
            if ch == ">":
                break
            if ch == "\\":
                chars.append(self.uchar())
            elif ch in " \t":
                raise self.error("whitespace inside IRI", self.pos - 1)
            else:
                chars.append(ch)
        try:
            return Iri("".join(chars))
        except InvalidIri as exc:
            raise self.error(f"invalid IRI: {exc.reason}", start + 1 + exc.position) from None

    def blank(self) -> BlankNode:
        start = self.pos
        if self.text[self.pos : self.pos + 2] != "_:":
            raise self.error("expected blank node")
        self.pos += 2
        label_start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in _PN_CHARS):
            self.pos += 1
        # a trailing dot terminates the statement rather than the label
        while self.pos > label_start and self.text[self.pos - 1] == ".":
            self.pos -= 1
        if self.pos == label_start:
            raise self.error("empty blank node label", start)
        return BlankNode(self.text[label_start : self.pos])

    def literal(self) -> Literal:
        start = self.pos
        self.expect('"')
        chars = []
        while True:
            ch = self.peek()
            if ch == "":
                raise self.error("unterminated string literal", start)
            self.pos += 1
            if ch == '"':
                break
            if ch == "\\":
                esc = self.peek()
                if esc in _SIMPLE_ESCAPES:
                    chars.append(_SIMPLE_ESCAPES[esc])
                    self.pos += 1
                else:
                    chars.append(self.uchar())
            else:
                chars.append(ch)
        lexical = "".join(chars)
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            return Literal(lexical, datatype=self.iri())
        if self.peek() == "@":
            self.pos += 1
            tag_start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "-"):
                self.pos += 1
            try:
                return Literal(lexical, language=self.text[tag_start : self.pos])
            except ValueError:
                raise self.error("invalid language tag", tag_start) from None
        return Literal(lexical)

    def term(self, allowed: str, role: str) -> Term:
        ch = self.peek()
        if ch == "<" and "i" in allowed:
            return self.iri()
        if ch == "_" and "b" in allowed:
            return self.blank()
        if ch == '"' and "l" in allowed:
            return self.literal()
        found = ch or "end of line"
        raise self.error(f"unexpected {found!r} where {role} was expected")

    def quad(self) -> Quad:
        self.skip_ws()
        subject = self.term("ib", "subject")
        self.skip_ws()
        predicate = self.term("i", "predicate")
        self.skip_ws()
        obj = self.term("ibl", "object")
        self.skip_ws()
        if self.peek() == ".":
            raise self.error("statement has no graph name; only named graphs are supported")
        graph = self.term("i", "graph name")
        self.skip_ws()
        self.expect(".")
        self.skip_ws()
        if self.pos < len(self.text) and self.peek() != "#":
            raise self.error(f"unexpected {self.peek()!r} after end of statement")
        return Quad(subject, predicate, obj, graph)  # type: ignore[arg-type]


def iter_nquads(text: str) -> Iterator[tuple[int, Quad]]:
    """Yield ``(line number, quad)`` pairs; raises on the first bad line."""
    # only LF (optionally CRLF) ends a line; U+2028 and friends may occur in literals
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r")
        stripped = line.strip(" \t")
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, _LineReader(line, lineno).quad()


def parse_nquads(text: str) -> list[Quad]:
    return [q for _, q in iter_nquads(text)]


def serialize_nquads(quads: Iterable[Quad]) -> str:
    """Sorted, newline-terminated N-Quads text."""
    lines = sorted(quad_to_nquads(q) for q in quads)
    return "".join(line + "\n" for line in lines)
