"""Fixture builders, random generators and independent oracles for the tests."""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence

from trustproc.chain import EvidenceGraph
from trustproc.policy import (
    AgentSet,
    And,
    AssertionMatches,
    ChainAnchored,
    ContextDefined,
    ContextEquals,
    HasEvidence,
    HasSource,
    Not,
    Or,
    Policy,
    PublishedAfter,
    PublishedBefore,
    Rule,
    SourceIn,
    SourceIs,
)
from trustproc.terms import Iri, Literal

NP = "http://ex.org/np/"
AGENT = "http://ex.org/agent/"
VOC = "http://ex.org/vocab/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
NPS = "http://www.nanopub.org/nschema#"
PROV = "http://www.w3.org/ns/prov#"
XSD_DT = "http://www.w3.org/2001/XMLSchema#dateTime"


def claim(name: str) -> Iri:
    return Iri(NP + name)


def agent(name: str) -> Iri:
    return Iri(AGENT + name)


def head_lines(np_id: str, assertion: str | None = None, provenance: str | None = None, pubinfo: str | None = None) -> list[str]:
    a = assertion or np_id + "/assertion"
    p = provenance or np_id + "/provenance"
    i = pubinfo or np_id + "/pubinfo"
    return [
        f"<{np_id}> <{RDF_TYPE}> <{NPS}Nanopublication> <{np_id}> .",
        f"<{np_id}> <{NPS}hasAssertion> <{a}> <{np_id}> .",
        f"<{np_id}> <{NPS}hasProvenance> <{p}> <{np_id}> .",
        f"<{np_id}> <{NPS}hasPublicationInfo> <{i}> <{np_id}> .",
    ]


def nanopub_doc(
    name: str,
    *,
    source: str | Sequence[str] | None = None,
    evidence: Iterable[str] = (),
    published: str | None = "2020-01-01T00:00:00Z",
    statements: Iterable[tuple[str, str]] = (("about", "thing"),),
    blank_subject: bool = False,
) -> str:
    """One nanopublication as an N-Quads document.

    ``source``/``evidence`` take local names (``"gov"``, ``"c2"``); statements
    are ``(predicate, object)`` local names under the vocab namespace.
    """
    np_id = NP + name
    a, p, i = np_id + "/assertion", np_id + "/provenance", np_id + "/pubinfo"
    lines = head_lines(np_id)
    subj = "_:s" if blank_subject else f"<{VOC}subject/{name}>"
    for pred, obj in statements:
        lines.append(f"{subj} <{VOC}{pred}> <{VOC}{obj}> <{a}> .")
    sources = [source] if isinstance(source, str) else list(source or [])
    for s in sources:
        lines.append(f"<{np_id}> <{PROV}wasAttributedTo> <{AGENT}{s}> <{p}> .")
    for e in evidence:
        lines.append(f"<{np_id}> <{PROV}wasDerivedFrom> <{NP}{e}> <{p}> .")
    lines.append(f"<{np_id}> <{VOC}recordedBy> <{VOC}crawler> <{p}> .")
    if published is not None:
        lines.append(f'<{np_id}> <{PROV}generatedAtTime> "{published}"^^<{XSD_DT}> <{i}> .')
    else:
        lines.append(f"<{np_id}> <{VOC}license> <{VOC}cc0> <{i}> .")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- oracles


def brute_force_chain(
    nodes: set[Iri],
    edges: dict[Iri, Sequence[Iri]],
    source_of: dict[Iri, Iri | None],
    start: Iri,
    roots: set[Iri],
    max_depth: int,
    mode: str,
) -> tuple[bool, int | None, tuple[Iri, ...] | None]:
    """Enumerate every simple evidence path from ``start``.

    A path ends at a claim whose source is a root (a good leaf) or at a dead
    end: no evidence, depth bound reached, a dangling citation, or a citation
    of a claim already on the path (bad leaves). ``any`` needs one good leaf;
    ``all`` needs every leaf good. Returns (anchored, depth, path) with the
    path chosen as (shortest, then lexicographically smallest) for ``any``
    and (longest, then lexicographically smallest) for ``all``.
    """
    good: list[tuple[Iri, ...]] = []
    bad = False
    stack: list[tuple[Iri, ...]] = [(start,)]
    while stack:
        path = stack.pop()
        x = path[-1]
        if source_of.get(x) in roots:
            good.append(path)
            continue
        hops = len(path) - 1
        out = [e for e in edges.get(x, ()) if e != x]
        if not out or hops >= max_depth:
            bad = True
            continue
        for e in out:
            if e not in nodes or e in path:
                bad = True
            else:
                stack.append(path + (e,))
    if mode == "any":
        if not good:
            return False, None, None
        best = min(good, key=lambda p: (len(p), p))
        return True, len(best) - 1, best
    if bad or not good:
        return False, None, None
    best = min(good, key=lambda p: (-len(p), p))
    return True, len(best) - 1, best


def oracle_for_graph(g: EvidenceGraph, start, roots, max_depth, mode):
    return brute_force_chain(
        set(g.nodes), dict(g.edges), dict(g.source_of), start, set(roots), max_depth, mode
    )


# ---------------------------------------------------------------- generators


def random_evidence_graph(rng: random.Random, max_nodes: int = 8) -> tuple[EvidenceGraph, list[Iri]]:
    n = rng.randint(1, max_nodes)
    nodes = [claim(f"c{i}") for i in range(n)]
    agents = [agent(f"a{i}") for i in range(4)]
    missing = [claim(f"m{i}") for i in range(2)]
    edges: dict[Iri, list[Iri]] = {}
    source_of: dict[Iri, Iri | None] = {}
    density = rng.random() * 0.5
    for x in nodes:
        targets = [y for y in nodes if y != x and rng.random() < density]
        if rng.random() < 0.1:
            targets.append(rng.choice(missing))
        edges[x] = targets
        source_of[x] = rng.choice(agents) if rng.random() < 0.7 else None
    return EvidenceGraph.from_edges(edges, source_of), agents


def random_roots(rng: random.Random, agents: Sequence[Iri]) -> set[Iri]:
    return {a for a in agents if rng.random() < 0.3}


_TIMES = ["2019-06-01T00:00:00Z", "2020-01-01T00:00:00Z", "2021-03-15T08:30:00Z", None]


def random_store_documents(rng: random.Random, max_claims: int = 50) -> list[str]:
    """Documents for a random store; one nanopub per document."""
    n = rng.randint(0, max_claims)
    names = [f"c{i}" for i in range(n)]
    docs = []
    for name in names:
        r = rng.random()
        source = None if r < 0.25 else (rng.choice(["a0", "a1", "a2", "a3", "gov"]))
        evidence = [e for e in names if e != name and rng.random() < 2.0 / max(n, 1)]
        if rng.random() < 0.05:
            evidence.append("missing")
        stmts = [(rng.choice(["p0", "p1", "p2"]), rng.choice(["o0", "o1"])) for _ in range(rng.randint(1, 3))]
        docs.append(
            nanopub_doc(
                name,
                source=source,
                evidence=evidence,
                published=rng.choice(_TIMES),
                statements=stmts,
                blank_subject=rng.random() < 0.2,
            )
        )
    return docs


_NAMES = ["alpha", "b", "set1", "publicFaith", "rule", "any", "x_y", "a.b-c"]
_KEYS = ["requester.iri", "action.id", "region", "topic", "k"]
_STRINGS = ["", "x", "hello world", 'quo"te', "back\\slash", "tab\there", "üñí", "line\nbreak"]


def _random_term(rng: random.Random):
    r = rng.random()
    if r < 0.4:
        return Iri(VOC + rng.choice(["o0", "o1", "Thing"]))
    if r < 0.6:
        return Literal(rng.choice(_STRINGS))
    if r < 0.8:
        return Literal(rng.choice(_STRINGS), datatype=Iri("http://www.w3.org/2001/XMLSchema#string"))
    return Literal(rng.choice(_STRINGS), language=rng.choice(["en", "pt-br", "de"]))


def random_atom(rng: random.Random, set_names: Sequence[str]):
    k = rng.randrange(10)
    if k == 0:
        return SourceIs(agent(rng.choice(["a0", "a1", "gov"])))
    if k == 1:
        return SourceIn(rng.choice(set_names))
    if k == 2:
        return HasSource()
    if k == 3:
        return HasEvidence()
    if k == 4:
        return PublishedAfter(rng.choice(_TIMES[:3]))
    if k == 5:
        return PublishedBefore(rng.choice(_TIMES[:3]))
    if k == 6:
        return ChainAnchored(rng.choice(set_names), rng.randint(1, 4), rng.choice(["any", "all"]))
    if k == 7:
        return ContextEquals(rng.choice(_KEYS), rng.choice(_STRINGS))
    if k == 8:
        return ContextDefined(rng.choice(_KEYS))
    pred = Iri(VOC + rng.choice(["p0", "p1", "p2"])) if rng.random() < 0.7 else None
    obj = _random_term(rng) if pred is None or rng.random() < 0.5 else None
    return AssertionMatches(pred, obj)


def random_condition(rng: random.Random, set_names: Sequence[str], depth: int = 0):
    r = rng.random()
    if depth >= 3 or r < 0.45:
        return random_atom(rng, set_names)
    if r < 0.65:
        return Not(random_condition(rng, set_names, depth + 1))
    ops = tuple(random_condition(rng, set_names, depth + 1) for _ in range(rng.randint(2, 3)))
    return And(ops) if r < 0.83 else Or(ops)


def random_policy(rng: random.Random) -> Policy:
    """A well-formed policy: every referenced set is declared inline."""
    n_sets = rng.randint(1, 3)
    set_names = rng.sample(_NAMES, n_sets)
    pool = [agent(a) for a in ("a0", "a1", "a2", "a3", "gov")]
    sets = tuple(AgentSet(name, frozenset(a for a in pool if rng.random() < 0.4)) for name in set_names)
    rules = tuple(
        Rule(f"r{i}", rng.choice(["accept", "reject"]), random_condition(rng, set_names))
        for i in range(rng.randint(0, 4))
    )
    return Policy(
        rng.choice(["p", "reader", "Policy_1"]),
        agent(rng.choice(["alice", "bob"])),
        rng.choice(["accept", "reject"]),
        rules,
        sets,
    )
