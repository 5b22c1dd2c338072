"""Nanopublication claims and the trust metadata extracted from them.

A claim is packaged as three named graphs: the assertion itself, its
provenance, and information about its publication. Trust metadata (who the
claim is attributed to, when it was published, which other claims it cites
as evidence) is read from the provenance and publication-info graphs only.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from datetime import datetime

from .terms import Iri, Literal, Quad
from .timestamps import MalformedTimestamp, parse_timestamp
from .vocab import DEFAULT_VOCABULARY, Vocabulary

__all__ = [
    "AmbiguousSource",
    "ClaimMeta",
    "MalformedTimestamp",
    "MetadataError",
    "Nanopublication",
    "NonIriReference",
    "Violation",
    "extract_meta",
    "validate_nanopub",
]

GRAPH_NAMES_NOT_DISTINCT = "graph-names-not-distinct"
EMPTY_ASSERTION = "empty-assertion"
MISSING_PROVENANCE = "missing-provenance"
MISSING_PUBINFO = "missing-pubinfo"


class MetadataError(ValueError):
    pass


class AmbiguousSource(MetadataError):
    pass


class NonIriReference(MetadataError):
    """A source or evidence target that is a blank node or literal."""


@dataclass(frozen=True, slots=True, order=True)
class Nanopublication:
    id: Iri
    assertion: Iri
    provenance: Iri
    pubinfo: Iri

    def graphs(self) -> tuple[Iri, Iri, Iri]:
        return (self.assertion, self.provenance, self.pubinfo)


@dataclass(frozen=True, slots=True, order=True)
class Violation:
    nanopub: Iri
    code: str
    graph: Iri
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.code}: {self.nanopub.value} (graph {self.graph.value})"
        return f"{text}: {self.detail}" if self.detail else text


@dataclass(frozen=True, slots=True)
class ClaimMeta:
    claim: Iri
    source: Iri | None = None
    published_at: datetime | None = None
    evidence: tuple[Iri, ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)


def validate_nanopub(quads: Iterable[Quad], np: Nanopublication) -> list[Violation]:
    """Check the three-graph structure of ``np`` against ``quads``.

    Returns one violation per failed invariant; an empty list means the
    nanopublication is well formed.
    """
    names = [np.id, *np.graphs()]
    violations: list[Violation] = []
    seen: dict[Iri, str] = {}
    for role, name in zip(("id", "assertion", "provenance", "pubinfo"), names):
        if name in seen:
            violations.append(
                Violation(np.id, GRAPH_NAMES_NOT_DISTINCT, name, f"{role} reuses the {seen[name]} name")
            )
        else:
            seen[name] = role
    populated = {q.graph for q in quads if q.graph in seen}
    if np.assertion not in populated:
        violations.append(Violation(np.id, EMPTY_ASSERTION, np.assertion))
    if np.provenance not in populated:
        violations.append(Violation(np.id, MISSING_PROVENANCE, np.provenance))
    if np.pubinfo not in populated:
        violations.append(Violation(np.id, MISSING_PUBINFO, np.pubinfo))
    return violations


def extract_meta(
    quads: Iterable[Quad],
    np: Nanopublication,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    *,
    strict: bool = True,
) -> ClaimMeta:
    """Read source, publication time and evidence for ``np``.

    Only statements whose subject is the claim id are considered. With
    ``strict=False`` metadata errors do not raise: the offending field is
    left absent and the error is recorded in ``warnings`` instead.
    """
    attributions: list[Quad] = []
    derivations: list[Quad] = []
    times: list[Quad] = []
    for q in dict.fromkeys(quads):
        if q.subject != np.id:
            continue
        if q.graph == np.provenance:
            if q.predicate == vocab.attribution:
                attributions.append(q)
            if q.predicate == vocab.derivation:
                derivations.append(q)
        if q.graph == np.pubinfo and q.predicate == vocab.published:
            times.append(q)

    warnings: list[str] = []

    def fail(exc: MetadataError) -> None:
        if strict:
            raise exc
        warnings.append(f"{type(exc).__name__}: {exc}")

    source = None
    if len(attributions) > 1:
        objs = ", ".join(sorted(str(q.object) for q in attributions))
        fail(AmbiguousSource(f"{np.id.value} has {len(attributions)} attributions: {objs}"))
    elif attributions:
        obj = attributions[0].object
        if isinstance(obj, Iri):
            source = obj
        else:
            fail(NonIriReference(f"{np.id.value} is attributed to non-IRI {obj}"))

    published_at = None
    if len(times) > 1:
        fail(MalformedTimestamp(f"{np.id.value} has {len(times)} publication times"))
    elif times:
        obj = times[0].object
        if isinstance(obj, Literal):
            try:
                published_at = parse_timestamp(obj.lexical)
            except MalformedTimestamp as exc:
                fail(exc)
        else:
            fail(MalformedTimestamp(f"{np.id.value} publication time {obj} is not a literal"))

    evidence: list[Iri] = []
    for q in sorted(derivations, key=lambda q: str(q.object)):
        obj = q.object
        if not isinstance(obj, Iri):
            fail(NonIriReference(f"{np.id.value} cites non-IRI evidence {obj}"))
            continue
        if obj == np.id:
            warnings.append(f"self-citation dropped: {np.id.value}")
            continue
        if obj not in evidence:
            evidence.append(obj)

    return ClaimMeta(np.id, source, published_at, tuple(evidence), tuple(warnings))
