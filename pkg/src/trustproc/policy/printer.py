"""Canonical policy printer; ``parse_policy(print_policy(p)) == p``."""

from __future__ import annotations

from ..terms import Iri, escape_string, term_to_nquads
from .ast import (
    AgentSet,
    And,
    AssertionMatches,
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
    Rule,
    SourceIn,
    SourceIs,
)

__all__ = ["print_atom", "print_condition", "print_policy"]


def _iri(i: Iri) -> str:
    return f"<{i.value}>"


def print_atom(c: Condition) -> str:
    match c:
        case SourceIs(agent):
            return f"source is {_iri(agent)}"
        case SourceIn(name):
            return f"source in {name}"
        case HasSource():
            return "has source"
        case HasEvidence():
            return "has evidence"
        case PublishedAfter(ts):
            return f"published after {ts}"
        case PublishedBefore(ts):
            return f"published before {ts}"
        case ChainAnchored(roots, depth, mode):
            return f"chain anchored in {roots} depth {depth} {mode}"
        case ContextEquals(key, value):
            return f'context {key} = "{escape_string(value)}"'
        case ContextDefined(key):
            return f"context {key} defined"
        case AssertionMatches(pred, obj):
            parts = ["assertion matches"]
            if pred is not None:
                parts.append(f"pred={_iri(pred)}")
            if obj is not None:
                parts.append(f"obj={term_to_nquads(obj)}")
            return " ".join(parts)
    raise TypeError(f"not a condition atom: {c!r}")


def print_condition(c: Condition) -> str:
    """Render ``c``; nested connectives are always parenthesized."""
    if isinstance(c, Or):
        return " or ".join(_wrap(op, Or) for op in c.operands)
    if isinstance(c, And):
        return " and ".join(_wrap(op, (And, Or)) for op in c.operands)
    if isinstance(c, Not):
        return "not " + _wrap(c.operand, (And, Or))
    return print_atom(c)


def _wrap(c: Condition, kinds) -> str:
    text = print_condition(c)
    return f"({text})" if isinstance(c, kinds) else text


def _print_set(s: AgentSet) -> str:
    members = ", ".join(_iri(m) for m in sorted(s.members))
    return f"set {s.name} {{ {members} }}" if members else f"set {s.name} {{ }}"


def _print_rule(r: Rule) -> str:
    return f"rule {r.name} {r.effect} when {print_condition(r.condition)}"


def print_policy(p: Policy) -> str:
    lines = [f"policy {p.name} for {_iri(p.owner)} default {p.default}"]
    lines.extend(_print_set(s) for s in p.sets)
    lines.extend(_print_rule(r) for r in p.rules)
    return "\n".join(lines) + "\n"
