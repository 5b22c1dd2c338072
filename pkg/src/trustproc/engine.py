"""The trust process: policies in, a binary Trusted Data partition out.

Every registered claim receives exactly one verdict, ``accept`` or
``reject``, together with a trace of the condition atoms that were actually
evaluated. There are no scores anywhere in the output.

The same machinery runs on the publisher side (:func:`publish_filter`): the
publisher's policy decides what is released to a given requester before the
consumer's own filter runs.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from datetime import datetime
from types import MappingProxyType

from .chain import ChainResolver, ChainResult, EvidenceGraph, UnknownClaim, build_evidence_graph
from .claims import ClaimMeta, extract_meta
from .policy.ast import (
    AgentSet,
    And,
    AssertionMatches,
    Atom,
    ChainAnchored,
    Condition,
    ContextDefined,
    ContextEquals,
    HasEvidence,
    HasSource,
    Not,
    Or,
    Policy,
    PublishedAfter,
    PublishedBefore,
    SourceIn,
    SourceIs,
    atoms,
)
from .policy.check import Diagnostic, check_policy, resolve_sets
from .policy.printer import print_atom
from .store import Pattern, Snapshot
from .terms import Iri
from .timestamps import parse_timestamp
from .vocab import ACTION_KEY, DEFAULT_VOCABULARY, REQUESTER_KEY, Vocabulary

__all__ = [
    "Context",
    "Decision",
    "MissingRequester",
    "PolicyInvalid",
    "TraceStep",
    "TrustedData",
    "UnknownClaim",
    "evaluate_claim",
    "explain",
    "filter",
    "publish_filter",
]


class PolicyInvalid(ValueError):
    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = tuple(diagnostics)
        super().__init__("policy is invalid: " + "; ".join(str(d) for d in self.diagnostics))


class MissingRequester(ValueError):
    pass


@dataclass(frozen=True)
class Context:
    """Key/value facts about the situation the Action takes place in."""

    entries: Mapping[str, str] = field(default_factory=dict)
    action_id: str | None = None

    def __post_init__(self) -> None:
        if any(not k for k in self.entries):
            raise ValueError("context keys must be non-empty")
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))

    def get(self, key: str) -> str | None:
        if key == ACTION_KEY and self.action_id is not None:
            return self.action_id
        return self.entries.get(key)

    def with_entries(self, extra: Mapping[str, str]) -> Context:
        return Context({**self.entries, **extra}, self.action_id)

    def as_dict(self) -> dict[str, str]:
        out = dict(self.entries)
        if self.action_id is not None:
            out[ACTION_KEY] = self.action_id
        return out

    @classmethod
    def from_lines(cls, text: str) -> Context:
        """Parse ``key=value`` lines; ``#`` starts a comment line."""
        entries: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            key, sep, value = stripped.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ValueError(f"context line {lineno}: expected key=value")
            if key in entries:
                raise ValueError(f"context line {lineno}: duplicate key {key!r}")
            entries[key] = value.strip()
        action = entries.pop(ACTION_KEY, None)
        return cls(entries, action)


@dataclass(frozen=True, slots=True)
class TraceStep:
    rule: str
    atom_index: int
    atom: str
    result: bool


@dataclass(frozen=True)
class Decision:
    claim: Iri
    verdict: str
    matched_rule: str | None = None
    trace: tuple[TraceStep, ...] = ()
    # keyed "rule#atom_index"
    chain_results: Mapping[str, ChainResult] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.verdict not in ("accept", "reject"):
            raise ValueError(f"verdict must be accept or reject, not {self.verdict!r}")

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "matched_rule": self.matched_rule,
            "trace": [
                {"rule": s.rule, "atom_index": s.atom_index, "atom": s.atom, "result": s.result}
                for s in self.trace
            ],
            "chains": {k: _chain_json(v) for k, v in sorted(self.chain_results.items())},
            "notes": list(self.notes),
        }


def _chain_json(r: ChainResult) -> dict:
    return {
        "anchored": r.anchored,
        "anchor": r.anchor_agent.value if r.anchor_agent else None,
        "depth": r.depth,
        "path": [c.value for c in r.path] if r.path is not None else None,
        "blockers": [
            {"claim": b.claim.value, "reason": b.reason, "detail": b.detail.value if b.detail else None}
            for b in r.blockers
        ],
    }


@dataclass(frozen=True)
class TrustedData:
    agent: Iri
    policy: str
    snapshot: str
    accepted: frozenset[Iri]
    decisions: Mapping[Iri, Decision]
    context: Mapping[str, str] = field(default_factory=dict)

    @property
    def rejected(self) -> frozenset[Iri]:
        return frozenset(c for c, d in self.decisions.items() if d.verdict == "reject")

    def summary(self) -> str:
        n = len(self.decisions)
        return f"accepted {len(self.accepted)} / rejected {n - len(self.accepted)} of {n}"

    def to_json(self) -> dict:
        return {
            "agent": self.agent.value,
            "policy": self.policy,
            "snapshot": self.snapshot,
            "context": dict(sorted(self.context.items())),
            "summary": {
                "accepted": len(self.accepted),
                "rejected": len(self.decisions) - len(self.accepted),
                "total": len(self.decisions),
            },
            "accepted": sorted(c.value for c in self.accepted),
            "decisions": {c.value: d.to_json() for c, d in sorted(self.decisions.items())},
        }

    def serialize(self) -> str:
        """Deterministic JSON report: sorted keys, sorted claims."""
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class _Evaluation:
    """State shared by all claim evaluations of one filter call."""

    def __init__(
        self,
        snap: Snapshot,
        policy: Policy,
        sets: Mapping[str, AgentSet] | None,
        ctx: Context,
        vocab: Vocabulary,
    ):
        diagnostics = check_policy(policy, sets)
        if diagnostics:
            raise PolicyInvalid(diagnostics)
        self.snap = snap
        self.policy = policy
        self.sets, _ = resolve_sets(policy, sets)
        self.ctx = ctx
        self.vocab = vocab
        self._graph: EvidenceGraph | None = None
        self._resolvers: dict[tuple[frozenset[Iri], int, str], ChainResolver] = {}
        self._timestamps: dict[str, datetime] = {}

    def graph(self) -> EvidenceGraph:
        if self._graph is None:
            self._graph = build_evidence_graph(self.snap, self.vocab)
        return self._graph

    def resolver(self, atom: ChainAnchored) -> ChainResolver:
        roots = self.sets[atom.roots].members
        key = (roots, atom.max_depth, atom.mode)
        if key not in self._resolvers:
            self._resolvers[key] = ChainResolver(self.graph(), roots, atom.max_depth, atom.mode)
        return self._resolvers[key]

    def timestamp(self, text: str) -> datetime:
        if text not in self._timestamps:
            self._timestamps[text] = parse_timestamp(text)
        return self._timestamps[text]

    def decide(self, claim: Iri) -> Decision:
        np = self.snap.nanopubs.get(claim)
        if np is None:
            raise UnknownClaim(claim)
        meta = extract_meta(self.snap.claim_quads(np), np, self.vocab, strict=False)
        trace: list[TraceStep] = []
        chains: dict[str, ChainResult] = {}
        for rule in self.policy.rules:
            state = _RuleState(self, rule.name, meta, trace, chains)
            if state.eval(rule.condition, 0):
                return Decision(claim, rule.effect, rule.name, tuple(trace), MappingProxyType(chains), meta.warnings)
        return Decision(claim, self.policy.default, None, tuple(trace), MappingProxyType(chains), meta.warnings)


class _RuleState:
    def __init__(self, ev: _Evaluation, rule: str, meta: ClaimMeta, trace: list[TraceStep], chains: dict):
        self.ev = ev
        self.rule = rule
        self.meta = meta
        self.trace = trace
        self.chains = chains

    def eval(self, cond: Condition, index: int) -> bool:
        """Evaluate ``cond`` whose first atom has pre-order index ``index``."""
        if isinstance(cond, (And, Or)):
            stop_on = isinstance(cond, Or)
            for op in cond.operands:
                if self.eval(op, index) == stop_on:
                    return stop_on
                index += len(atoms(op))
            return not stop_on
        if isinstance(cond, Not):
            return not self.eval(cond.operand, index)
        result = self.atom(cond, index)
        self.trace.append(TraceStep(self.rule, index, print_atom(cond), result))
        return result

    def atom(self, a: Atom, index: int) -> bool:
        meta = self.meta
        if isinstance(a, SourceIs):
            return meta.source == a.agent
        if isinstance(a, SourceIn):
            return meta.source is not None and meta.source in self.ev.sets[a.set_name].members
        if isinstance(a, HasSource):
            return meta.source is not None
        if isinstance(a, HasEvidence):
            return bool(meta.evidence)
        if isinstance(a, PublishedAfter):
            return meta.published_at is not None and meta.published_at > self.ev.timestamp(a.timestamp)
        if isinstance(a, PublishedBefore):
            return meta.published_at is not None and meta.published_at < self.ev.timestamp(a.timestamp)
        if isinstance(a, ChainAnchored):
            result = self.ev.resolver(a).resolve(meta.claim)
            self.chains[f"{self.rule}#{index}"] = result
            return result.anchored
        if isinstance(a, ContextEquals):
            return self.ev.ctx.get(a.key) == a.value
        if isinstance(a, ContextDefined):
            return self.ev.ctx.get(a.key) is not None
        if isinstance(a, AssertionMatches):
            np = self.ev.snap.nanopubs[meta.claim]
            pattern = Pattern(predicate=a.predicate, object=a.object, graph=np.assertion)
            return bool(self.ev.snap.query(pattern))
        raise TypeError(f"unknown condition atom {a!r}")


def evaluate_claim(
    snap: Snapshot,
    policy: Policy,
    sets: Mapping[str, AgentSet] | None,
    ctx: Context,
    claim: Iri,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
) -> Decision:
    """Decide one claim: first matching rule wins, else the policy default."""
    return _Evaluation(snap, policy, sets, ctx, vocab).decide(claim)


def filter(  # noqa: A001 - the trust filter is the central operation
    snap: Snapshot,
    policy: Policy,
    sets: Mapping[str, AgentSet] | None,
    ctx: Context,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    *,
    claims: Iterable[Iri] | None = None,
) -> TrustedData:
    """Partition the snapshot's claims (or ``claims``) into accepted and rejected."""
    ev = _Evaluation(snap, policy, sets, ctx, vocab)
    scope = snap.claims() if claims is None else sorted(set(claims))
    decisions = {c: ev.decide(c) for c in scope}
    accepted = frozenset(c for c, d in decisions.items() if d.verdict == "accept")
    return TrustedData(policy.owner, policy.name, snap.digest, accepted, MappingProxyType(decisions), ctx.as_dict())


def publish_filter(
    snap: Snapshot,
    policy: Policy,
    sets: Mapping[str, AgentSet] | None,
    requester: Iri | None,
    ctx: Context,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    *,
    claims: Iterable[Iri] | None = None,
) -> TrustedData:
    """Decide what the publisher releases to ``requester``.

    The requester IRI and the action id are injected into the context under
    the reserved keys before the publisher's policy is evaluated.
    """
    if requester is None:
        raise MissingRequester("publish_filter needs the requesting agent's IRI")
    injected = {REQUESTER_KEY: requester.value}
    if ctx.action_id is not None:
        injected[ACTION_KEY] = ctx.action_id
    return filter(snap, policy, sets, ctx.with_entries(injected), vocab, claims=claims)


def explain(decision: Decision) -> str:
    """Render a decision as stable, human-readable text."""
    lines = [f"claim <{decision.claim.value}>"]
    if decision.matched_rule is None:
        lines.append(f"verdict: {decision.verdict} (no rule matched; default {decision.verdict})")
    else:
        lines.append(f"verdict: {decision.verdict} (rule {decision.matched_rule})")
    if decision.trace:
        lines.append("evaluated:")
    for step in decision.trace:
        lines.append(f"  {step.rule}[{step.atom_index}] {step.atom} => {'true' if step.result else 'false'}")
        chain = decision.chain_results.get(f"{step.rule}#{step.atom_index}")
        if chain is None:
            continue
        if chain.anchored:
            assert chain.path is not None and chain.anchor_agent is not None
            route = " -> ".join(f"<{c.value}>" for c in chain.path)
            lines.append(f"    chain {route} anchored by <{chain.anchor_agent.value}> at depth {chain.depth}")
        else:
            lines.append("    chain not anchored")
            for b in chain.blockers:
                detail = f" <{b.detail.value}>" if b.detail else ""
                lines.append(f"      {b.reason}: <{b.claim.value}>{detail}")
    for note in decision.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"

