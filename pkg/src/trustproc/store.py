"""In-memory named-graph quad store.

Writers go through :class:`Store`; every read used for trust evaluation goes
through an immutable :class:`Snapshot`. Graph contents are held as frozensets
and replaced (never mutated) on ingestion, so taking a snapshot only copies
the index dictionaries.

Nanopublication heads are declared inside documents with four reserved
statements in the head's own graph::

    <np> rdf:type np:Nanopublication <np> .
    <np> np:hasAssertion <g1> <np> .
    <np> np:hasProvenance <g2> <np> .
    <np> np:hasPublicationInfo <g3> <np> .

Those statements are consumed into the nanopublication index rather than the
quad set; serialization regenerates them.
"""

from __future__ import annotations

import hashlib
import logging
import os
from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from datetime import datetime, timezone
from types import MappingProxyType

from .claims import Nanopublication, Violation, validate_nanopub
from .nquads import DocumentSyntaxError, parse_nquads, serialize_nquads
from .terms import BlankNode, Iri, Quad, Term
from .timestamps import format_timestamp
from .vocab import (
    HAS_ASSERTION,
    HAS_PROVENANCE,
    HAS_PUBLICATION_INFO,
    HEAD_PREDICATES,
    NANOPUBLICATION,
    RDF_TYPE,
)

__all__ = [
    "DocumentSyntaxError",
    "IngestReport",
    "Pattern",
    "Snapshot",
    "Store",
    "ValidationFailed",
    "head_quads",
    "query",
    "snapshot",
]

log = logging.getLogger(__name__)

BATCH_HEADER = "# batch "


class ValidationFailed(ValueError):
    def __init__(self, violations: Iterable[Violation]):
        self.violations = tuple(sorted(violations))
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"document rejected, {len(self.violations)} violation(s): {lines}")


@dataclass(frozen=True, slots=True)
class Pattern:
    subject: Iri | BlankNode | None = None
    predicate: Iri | None = None
    object: Term | None = None
    graph: Iri | None = None

    def matches(self, q: Quad) -> bool:
        return (
            (self.subject is None or q.subject == self.subject)
            and (self.predicate is None or q.predicate == self.predicate)
            and (self.object is None or q.object == self.object)
            and (self.graph is None or q.graph == self.graph)
        )


@dataclass(frozen=True, slots=True)
class IngestReport:
    added: int = 0
    duplicates: int = 0
    nanopubs: tuple[Iri, ...] = ()
    violations: tuple[Violation, ...] = ()

    def summary(self) -> str:
        return f"added {self.added}, duplicates {self.duplicates}, nanopubs {len(self.nanopubs)}"


def head_quads(np: Nanopublication) -> list[Quad]:
    return [
        Quad(np.id, RDF_TYPE, NANOPUBLICATION, np.id),
        Quad(np.id, HAS_ASSERTION, np.assertion, np.id),
        Quad(np.id, HAS_PROVENANCE, np.provenance, np.id),
        Quad(np.id, HAS_PUBLICATION_INFO, np.pubinfo, np.id),
    ]


_EMPTY: frozenset[Quad] = frozenset()


class Snapshot:
    """Immutable view of a store at an ingestion boundary."""

    __slots__ = ("_graphs", "_by_pg", "_nanopubs", "_size", "_digest")

    def __init__(
        self,
        graphs: Mapping[Iri, frozenset[Quad]],
        by_pg: Mapping[tuple[Iri, Iri], frozenset[Quad]],
        nanopubs: Mapping[Iri, Nanopublication],
    ):
        self._graphs = MappingProxyType(dict(graphs))
        self._by_pg = MappingProxyType(dict(by_pg))
        self._nanopubs = MappingProxyType(dict(nanopubs))
        self._size = sum(len(qs) for qs in self._graphs.values())
        self._digest: str | None = None

    @property
    def nanopubs(self) -> Mapping[Iri, Nanopublication]:
        return self._nanopubs

    def claims(self) -> list[Iri]:
        return sorted(self._nanopubs)

    def graph(self, name: Iri) -> frozenset[Quad]:
        return self._graphs.get(name, _EMPTY)

    def graph_names(self) -> list[Iri]:
        return sorted(self._graphs)

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator[Quad]:
        for qs in self._graphs.values():
            yield from qs

    def quads(self) -> frozenset[Quad]:
        return frozenset(self)

    def query(self, p: Pattern) -> frozenset[Quad]:
        if p.graph is not None and p.predicate is not None:
            candidates: Iterable[Quad] = self._by_pg.get((p.predicate, p.graph), _EMPTY)
        elif p.graph is not None:
            candidates = self._graphs.get(p.graph, _EMPTY)
        else:
            candidates = self
        if p.subject is None and p.object is None and (p.graph is not None or p.predicate is None):
            return frozenset(candidates)
        return frozenset(q for q in candidates if p.matches(q))

    def claim_quads(self, np: Nanopublication) -> frozenset[Quad]:
        return self.graph(np.assertion) | self.graph(np.provenance) | self.graph(np.pubinfo)

    def to_nquads(self) -> str:
        """Canonical serialization: every quad plus regenerated heads, sorted."""
        heads = [q for np in self._nanopubs.values() for q in head_quads(np)]
        return serialize_nquads(set(self) | set(heads))

    @property
    def digest(self) -> str:
        """Order-independent SHA-256 over the canonical serialization."""
        if self._digest is None:
            self._digest = "sha256:" + hashlib.sha256(self.to_nquads().encode("utf-8")).hexdigest()
        return self._digest


def query(snap: Snapshot, p: Pattern) -> frozenset[Quad]:
    return snap.query(p)


def snapshot(store: Store) -> Snapshot:
    return store.snapshot()


def _relabel_blanks(quads: list[Quad], scope: str) -> list[Quad]:
    def fix(t):
        return BlankNode(f"{scope}_{t.label}") if isinstance(t, BlankNode) else t

    return [
        Quad(fix(q.subject), q.predicate, fix(q.object), q.graph)
        if isinstance(q.subject, BlankNode) or isinstance(q.object, BlankNode)
        else q
        for q in quads
    ]


def _is_head_quad(q: Quad) -> bool:
    if q.predicate in HEAD_PREDICATES:
        return True
    return q.predicate == RDF_TYPE and q.object == NANOPUBLICATION


def _collect_heads(
    head: list[Quad],
) -> tuple[dict[Iri, Nanopublication], list[Violation]]:
    violations: list[Violation] = []
    slots: dict[Iri, dict[Iri, set[Term]]] = defaultdict(lambda: defaultdict(set))
    for q in head:
        if isinstance(q.subject, BlankNode):
            violations.append(Violation(q.graph, "blank-nanopub-id", q.graph, str(q.subject)))
            continue
        if q.graph != q.subject:
            violations.append(
                Violation(q.subject, "misplaced-head", q.graph, "head statements belong in the nanopub's own graph")
            )
            continue
        slots[q.subject][q.predicate].add(q.object)

    found: dict[Iri, Nanopublication] = {}
    for np_id, parts in slots.items():
        graphs: dict[Iri, Iri] = {}
        for pred in (RDF_TYPE, HAS_ASSERTION, HAS_PROVENANCE, HAS_PUBLICATION_INFO):
            values = parts.get(pred, set())
            if not values:
                violations.append(Violation(np_id, "incomplete-head", np_id, f"missing {pred.value}"))
            elif len(values) > 1:
                violations.append(Violation(np_id, "conflicting-head", np_id, f"several values for {pred.value}"))
            elif pred != RDF_TYPE:
                (value,) = values
                if isinstance(value, Iri):
                    graphs[pred] = value
                else:
                    violations.append(Violation(np_id, "non-iri-graph-name", np_id, str(value)))
        if len(graphs) == 3 and RDF_TYPE in parts and len(parts[RDF_TYPE]) == 1:
            found[np_id] = Nanopublication(
                np_id, graphs[HAS_ASSERTION], graphs[HAS_PROVENANCE], graphs[HAS_PUBLICATION_INFO]
            )
    return found, violations


@dataclass
class Store:
    """Single-writer quad store with optional write-through logging."""

    log_path: str | os.PathLike[str] | None = None
    clock: Callable[[], datetime] = field(default=lambda: datetime.now(timezone.utc))
    _graphs: dict[Iri, frozenset[Quad]] = field(default_factory=dict, init=False, repr=False)
    _by_pg: dict[tuple[Iri, Iri], frozenset[Quad]] = field(default_factory=dict, init=False, repr=False)
    _nanopubs: dict[Iri, Nanopublication] = field(default_factory=dict, init=False, repr=False)

    def snapshot(self) -> Snapshot:
        return Snapshot(self._graphs, self._by_pg, self._nanopubs)

    def __contains__(self, q: Quad) -> bool:
        return q in self._graphs.get(q.graph, _EMPTY)

    def ingest_document(self, text: str, *, relabel_blanks: bool = True) -> IngestReport:
        """Parse and add one document, all or nothing.

        Raises :class:`DocumentSyntaxError` or :class:`ValidationFailed`; in
        either case the store is left untouched.
        """
        parsed = parse_nquads(text)
        if relabel_blanks:
            # scope blank labels to this document; the scope depends only on
            # the document text, so ingestion order does not affect labels
            scope = "d" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
            parsed = _relabel_blanks(parsed, scope)

        head = [q for q in parsed if _is_head_quad(q)]
        content = [q for q in parsed if not _is_head_quad(q)]
        declared, violations = _collect_heads(head)

        new_quads: set[Quad] = set()
        duplicates = 0
        for q in content:
            if q in new_quads or q in self:
                duplicates += 1
            else:
                new_quads.add(q)

        by_graph: dict[Iri, set[Quad]] = defaultdict(set)
        for q in new_quads:
            by_graph[q.graph].add(q)

        registered: list[Iri] = []
        for np_id, np in sorted(declared.items()):
            existing = self._nanopubs.get(np_id)
            if existing is not None:
                if existing != np:
                    violations.append(
                        Violation(np_id, "conflicting-head", np_id, "redeclared with different graph names")
                    )
                continue
            visible = [
                q
                for g in np.graphs()
                for q in (*self._graphs.get(g, _EMPTY), *by_graph.get(g, ()))
            ]
            violations.extend(validate_nanopub(visible, np))
            registered.append(np_id)

        if violations:
            raise ValidationFailed(violations)

        for g, qs in by_graph.items():
            self._graphs[g] = self._graphs.get(g, _EMPTY) | qs
        by_pg: dict[tuple[Iri, Iri], set[Quad]] = defaultdict(set)
        for q in new_quads:
            by_pg[(q.predicate, q.graph)].add(q)
        for key, qs in by_pg.items():
            self._by_pg[key] = self._by_pg.get(key, _EMPTY) | qs
        for np_id in registered:
            self._nanopubs[np_id] = declared[np_id]

        report = IngestReport(len(new_quads), duplicates, tuple(registered))
        log.debug("ingested document: %s", report.summary())
        if self.log_path is not None and (new_quads or declared):
            self._append_log(new_quads, declared.values())
        return report

    def _append_log(self, quads: Iterable[Quad], heads: Iterable[Nanopublication]) -> None:
        body = serialize_nquads([*quads, *(q for np in heads for q in head_quads(np))])
        stamp = format_timestamp(self.clock())
        with open(self.log_path, "a", encoding="utf-8") as fh:  # type: ignore[arg-type]
            fh.write(f"{BATCH_HEADER}{stamp}\n{body}")

    @classmethod
    def from_log(cls, path: str | os.PathLike[str], *, write_through: bool = True) -> Store:
        """Rebuild a store by replaying each batch of an append-only log."""
        store = cls()
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        batches: list[list[str]] = []
        for line in text.splitlines(keepends=True):
            if line.startswith(BATCH_HEADER) or not batches:
                batches.append([])
            batches[-1].append(line)
        for batch in batches:
            store.ingest_document("".join(batch), relabel_blanks=False)
        if write_through:
            store.log_path = path
        return store
