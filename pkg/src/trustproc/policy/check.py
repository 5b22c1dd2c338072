"""Semantic checks that the grammar alone cannot enforce."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from ..terms import BlankNode
from ..timestamps import MalformedTimestamp, parse_timestamp
from .ast import (
    AgentSet,
    AssertionMatches,
    ChainAnchored,
    Policy,
    PublishedAfter,
    PublishedBefore,
    SourceIn,
    atoms,
)

__all__ = ["Diagnostic", "check_policy", "resolve_sets"]

MAX_DEPTH = 999_999_999


@dataclass(frozen=True, slots=True, order=True)
class Diagnostic:
    code: str
    rule: str
    detail: str

    def __str__(self) -> str:
        where = f"{self.rule}/{self.detail}" if self.rule else self.detail
        return f"{self.code}: {where}"


def resolve_sets(
    policy: Policy, extra: Mapping[str, AgentSet] | None = None
) -> tuple[dict[str, AgentSet], list[Diagnostic]]:
    """Merge the policy's inline sets with ``extra``.

    A name bound twice to different members is a conflict; the inline
    definition wins so evaluation stays defined, but a diagnostic is raised.
    """
    merged: dict[str, AgentSet] = dict(extra or {})
    problems: list[Diagnostic] = []
    seen_inline: set[str] = set()
    for s in policy.sets:
        if s.name in seen_inline:
            problems.append(Diagnostic("duplicate-set", "", s.name))
        elif s.name in merged and merged[s.name].members != s.members:
            problems.append(Diagnostic("conflicting-set", "", s.name))
        seen_inline.add(s.name)
        merged[s.name] = s
    return merged, problems


def check_policy(policy: Policy, sets: Mapping[str, AgentSet] | None = None) -> list[Diagnostic]:
    """Return diagnostics for ``policy``; an empty list means it is valid."""
    resolved, diags = resolve_sets(policy, sets)
    seen_rules: set[str] = set()
    for rule in policy.rules:
        if rule.name in seen_rules:
            diags.append(Diagnostic("duplicate-rule", rule.name, rule.name))
        seen_rules.add(rule.name)
        for atom in atoms(rule.condition):
            if isinstance(atom, SourceIn) and atom.set_name not in resolved:
                diags.append(Diagnostic("unresolved-set", rule.name, atom.set_name))
            elif isinstance(atom, ChainAnchored):
                if atom.roots not in resolved:
                    diags.append(Diagnostic("unresolved-set", rule.name, atom.roots))
                if not 1 <= atom.max_depth <= MAX_DEPTH:
                    diags.append(Diagnostic("bad-depth", rule.name, str(atom.max_depth)))
            elif isinstance(atom, (PublishedAfter, PublishedBefore)):
                try:
                    parse_timestamp(atom.timestamp)
                except MalformedTimestamp:
                    diags.append(Diagnostic("bad-timestamp", rule.name, atom.timestamp))
            elif isinstance(atom, AssertionMatches):
                if atom.predicate is None and atom.object is None:
                    diags.append(Diagnostic("empty-pattern", rule.name, "assertion matches"))
                if isinstance(atom.object, BlankNode):
                    diags.append(Diagnostic("blank-in-pattern", rule.name, str(atom.object)))
    return diags
