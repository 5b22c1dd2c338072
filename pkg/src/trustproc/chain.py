"""Evidence chains: is a claim anchored in a set of trusted root agents?

A claim is anchored at depth 0 when its own source is a root. Otherwise it
may be anchored through the claims it cites as evidence, one hop per level,
up to ``max_depth`` hops. In ``any`` mode one anchored evidence claim is
enough; in ``all`` mode every cited claim must be anchored (and there must be
at least one). A claim already on the current path never contributes, so
mutual citation cannot bootstrap trust.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

from .claims import extract_meta
from .store import Snapshot
from .terms import Iri
from .vocab import DEFAULT_VOCABULARY, Vocabulary

__all__ = [
    "Blocker",
    "ChainResolver",
    "ChainResult",
    "EvidenceGraph",
    "UnknownClaim",
    "build_evidence_graph",
    "resolve_all",
    "resolve_chain",
]

CYCLE = "cycle"
DANGLING = "dangling"
DEPTH_EXCEEDED = "depth-exceeded"
UNTRUSTED_SOURCE = "untrusted-source"
NO_EVIDENCE = "no-evidence"


class UnknownClaim(LookupError):
    def __init__(self, claim: Iri):
        super().__init__(f"unknown claim {claim.value}")
        self.claim = claim


@dataclass(frozen=True, slots=True)
class EvidenceGraph:
    nodes: frozenset[Iri]
    source_of: Mapping[Iri, Iri | None]
    edges: Mapping[Iri, tuple[Iri, ...]]
    # claims whose source statement exists but is unusable (ambiguous, non-IRI)
    flags: Mapping[Iri, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def from_edges(
        cls,
        edges: Mapping[Iri, Iterable[Iri]],
        source_of: Mapping[Iri, Iri | None] | None = None,
        flags: Mapping[Iri, Iterable[str]] | None = None,
    ) -> EvidenceGraph:
        """Build a graph directly; every key of ``edges`` is a node."""
        source_of = source_of or {}
        nodes = frozenset(edges)
        return cls(
            nodes,
            MappingProxyType({n: source_of.get(n) for n in nodes}),
            MappingProxyType({n: tuple(sorted(set(edges[n]) - {n})) for n in nodes}),
            MappingProxyType({n: tuple(v) for n, v in (flags or {}).items() if n in nodes}),
        )

    def dangling(self, claim: Iri) -> tuple[Iri, ...]:
        return tuple(e for e in self.edges.get(claim, ()) if e not in self.nodes)

    def has_source(self, claim: Iri) -> bool:
        return self.source_of.get(claim) is not None or bool(self.flags.get(claim))


@dataclass(frozen=True, slots=True, order=True)
class Blocker:
    claim: Iri
    reason: str
    detail: Iri | None = None


@dataclass(frozen=True, slots=True)
class ChainResult:
    claim: Iri
    anchored: bool
    anchor_agent: Iri | None = None
    depth: int | None = None
    path: tuple[Iri, ...] | None = None
    blockers: tuple[Blocker, ...] = ()

    def __post_init__(self) -> None:
        present = (self.anchor_agent is not None, self.depth is not None, self.path is not None)
        if self.anchored != all(present) or (not self.anchored and any(present)):
            raise ValueError("anchored results carry agent, depth and path; others carry none")
        if self.anchored:
            assert self.path is not None
            if self.depth != len(self.path) - 1 or self.path[0] != self.claim:
                raise ValueError("depth must equal path length - 1 and path must start at the claim")


def build_evidence_graph(snap: Snapshot, vocab: Vocabulary = DEFAULT_VOCABULARY) -> EvidenceGraph:
    source_of: dict[Iri, Iri | None] = {}
    edges: dict[Iri, tuple[Iri, ...]] = {}
    flags: dict[Iri, tuple[str, ...]] = {}
    for claim, np in sorted(snap.nanopubs.items()):
        meta = extract_meta(snap.claim_quads(np), np, vocab, strict=False)
        source_of[claim] = meta.source
        edges[claim] = meta.evidence
        problems = tuple(
            w for w in meta.warnings if w.startswith("AmbiguousSource") or "attributed to non-IRI" in w
        )
        if problems:
            flags[claim] = problems
    return EvidenceGraph(
        frozenset(source_of),
        MappingProxyType(source_of),
        MappingProxyType(edges),
        MappingProxyType(flags),
    )


def _anchor_distances(g: EvidenceGraph, roots: frozenset[Iri]) -> dict[Iri, int]:
    """Fewest evidence hops from each claim to a root-sourced claim."""
    preds: dict[Iri, list[Iri]] = {n: [] for n in g.nodes}
    for n in g.nodes:
        for e in g.edges.get(n, ()):
            if e in preds:
                preds[e].append(n)
    dist = {n: 0 for n in g.nodes if g.source_of.get(n) in roots}
    queue = deque(sorted(dist))
    while queue:
        n = queue.popleft()
        for p in preds[n]:
            if p not in dist:
                dist[p] = dist[n] + 1
                queue.append(p)
    return dist


def _reaches(g: EvidenceGraph, start: Iri, target: Iri) -> bool:
    seen = {start}
    stack = [start]
    while stack:
        n = stack.pop()
        if n == target:
            return True
        for e in g.edges.get(n, ()):
            if e in g.nodes and e not in seen:
                seen.add(e)
                stack.append(e)
    return False


def _any_blockers(g: EvidenceGraph, claim: Iri, roots: frozenset[Iri], max_depth: int) -> tuple[Blocker, ...]:
    level = {claim: 0}
    queue = deque([claim])
    out: set[Blocker] = set()
    while queue:
        x = queue.popleft()
        k = level[x]
        if g.source_of.get(x) in roots:
            continue
        live = [e for e in g.edges.get(x, ()) if e in g.nodes]
        if g.has_source(x):
            out.add(Blocker(x, UNTRUSTED_SOURCE, g.source_of.get(x)))
        elif not live:
            out.add(Blocker(x, NO_EVIDENCE))
        for e in g.dangling(x):
            out.add(Blocker(x, DANGLING, e))
        if live and k >= max_depth:
            out.add(Blocker(x, DEPTH_EXCEEDED))
            continue
        for e in live:
            if e == x or _reaches(g, e, x):
                out.add(Blocker(x, CYCLE, e))
            if e not in level:
                level[e] = k + 1
                queue.append(e)
    return tuple(sorted(out))


def _resolve_any(
    g: EvidenceGraph, claim: Iri, roots: frozenset[Iri], max_depth: int, dist: Mapping[Iri, int]
) -> ChainResult:
    d = dist.get(claim)
    if d is None or d > max_depth:
        return ChainResult(claim, False, blockers=_any_blockers(g, claim, roots, max_depth))
    path = [claim]
    x = claim
    while dist[x] > 0:
        x = min(e for e in g.edges[x] if dist.get(e) == dist[x] - 1)
        path.append(x)
    return ChainResult(claim, True, g.source_of[x], d, tuple(path))


_Outcome = tuple[bool, tuple[Iri, ...], frozenset[Blocker]]


def _resolve_all_mode(
    g: EvidenceGraph,
    claim: Iri,
    roots: frozenset[Iri],
    max_depth: int,
    memo: dict[tuple[Iri, frozenset[Iri]], _Outcome],
) -> ChainResult:
    def visit(x: Iri, on_path: frozenset[Iri]) -> _Outcome:
        key = (x, on_path)
        if key in memo:
            return memo[key]
        if g.source_of.get(x) in roots:
            result: _Outcome = (True, (x,), frozenset())
            memo[key] = result
            return result
        blockers: set[Blocker] = set()
        edges = g.edges.get(x, ())
        hops = len(on_path) - 1
        if g.has_source(x):
            blockers.add(Blocker(x, UNTRUSTED_SOURCE, g.source_of.get(x)))
        if not edges:
            if not g.has_source(x):
                blockers.add(Blocker(x, NO_EVIDENCE))
            result = (False, (), frozenset(blockers))
        elif hops >= max_depth:
            blockers.add(Blocker(x, DEPTH_EXCEEDED))
            result = (False, (), frozenset(blockers))
        else:
            ok = True
            best: tuple[Iri, ...] = ()
            for e in edges:
                if e not in g.nodes:
                    ok = False
                    blockers.add(Blocker(x, DANGLING, e))
                elif e in on_path:
                    ok = False
                    blockers.add(Blocker(x, CYCLE, e))
                else:
                    sub_ok, sub_path, sub_blockers = visit(e, on_path | {e})
                    if sub_ok:
                        # deepest requirement decides; edges are sorted, so
                        # strict comparison keeps the smallest IRI on ties
                        if len(sub_path) > len(best):
                            best = sub_path
                    else:
                        ok = False
                        blockers |= sub_blockers
            if ok:
                result = (True, (x, *best), frozenset())
            else:
                result = (False, (), frozenset(blockers))
        memo[key] = result
        return result

    ok, path, blockers = visit(claim, frozenset({claim}))
    if ok:
        return ChainResult(claim, True, g.source_of[path[-1]], len(path) - 1, path)
    return ChainResult(claim, False, blockers=tuple(sorted(blockers)))


def _check_args(max_depth: int, mode: str) -> None:
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    if mode not in ("any", "all"):
        raise ValueError(f"mode must be 'any' or 'all', not {mode!r}")


class ChainResolver:
    """Resolves claims of one graph under fixed roots, depth bound and mode.

    Results are computed on demand and cached, so a resolver can be shared
    by every evaluation that uses the same parameters.
    """

    def __init__(self, g: EvidenceGraph, roots: Iterable[Iri], max_depth: int, mode: str = "any"):
        _check_args(max_depth, mode)
        self.graph = g
        self.roots = frozenset(roots)
        self.max_depth = max_depth
        self.mode = mode
        self._dist: dict[Iri, int] | None = None
        self._memo: dict[tuple[Iri, frozenset[Iri]], _Outcome] = {}
        self._results: dict[Iri, ChainResult] = {}

    def resolve(self, claim: Iri) -> ChainResult:
        if claim not in self.graph.nodes:
            raise UnknownClaim(claim)
        result = self._results.get(claim)
        if result is None:
            if self.mode == "any":
                if self._dist is None:
                    self._dist = _anchor_distances(self.graph, self.roots)
                result = _resolve_any(self.graph, claim, self.roots, self.max_depth, self._dist)
            else:
                result = _resolve_all_mode(self.graph, claim, self.roots, self.max_depth, self._memo)
            self._results[claim] = result
        return result


def resolve_chain(
    g: EvidenceGraph, claim: Iri, roots: Iterable[Iri], max_depth: int, mode: str = "any"
) -> ChainResult:
    return ChainResolver(g, roots, max_depth, mode).resolve(claim)


def resolve_all(
    g: EvidenceGraph, roots: Iterable[Iri], max_depth: int, mode: str = "any"
) -> dict[Iri, ChainResult]:
    """Resolve every claim, sharing work across claims."""
    resolver = ChainResolver(g, roots, max_depth, mode)
    return {c: resolver.resolve(c) for c in sorted(g.nodes)}
