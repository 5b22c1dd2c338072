"""Policy syntax tree.

Conditions form a closed sum type. All nodes are frozen dataclasses, so
structural equality is plain ``==`` and values can be shared freely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Literal as Lit
from typing import Union

from ..terms import Iri, Term

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")

Effect = Lit["accept", "reject"]
Mode = Lit["any", "all"]
EFFECTS = ("accept", "reject")
MODES = ("any", "all")


def _check_name(kind: str, name: str) -> None:
    if not NAME_RE.fullmatch(name):
        raise ValueError(f"invalid {kind} name {name!r}")


@dataclass(frozen=True, slots=True)
class SourceIs:
    agent: Iri


@dataclass(frozen=True, slots=True)
class SourceIn:
    set_name: str

    def __post_init__(self) -> None:
        _check_name("set", self.set_name)


@dataclass(frozen=True, slots=True)
class HasSource:
    pass


@dataclass(frozen=True, slots=True)
class HasEvidence:
    pass


@dataclass(frozen=True, slots=True)
class PublishedAfter:
    timestamp: str


@dataclass(frozen=True, slots=True)
class PublishedBefore:
    timestamp: str


@dataclass(frozen=True, slots=True)
class ChainAnchored:
    roots: str
    max_depth: int
    mode: Mode = "any"

    def __post_init__(self) -> None:
        _check_name("set", self.roots)
        if isinstance(self.max_depth, bool) or not isinstance(self.max_depth, int) or self.max_depth < 1:
            raise ValueError(f"chain depth must be a positive integer, not {self.max_depth!r}")
        if self.mode not in MODES:
            raise ValueError(f"invalid chain mode {self.mode!r}")


@dataclass(frozen=True, slots=True)
class ContextEquals:
    key: str
    value: str

    def __post_init__(self) -> None:
        _check_name("context key", self.key)


@dataclass(frozen=True, slots=True)
class ContextDefined:
    key: str

    def __post_init__(self) -> None:
        _check_name("context key", self.key)


@dataclass(frozen=True, slots=True)
class AssertionMatches:
    predicate: Iri | None = None
    object: Term | None = None


@dataclass(frozen=True, slots=True)
class And:
    operands: tuple[Condition, ...]

    def __post_init__(self) -> None:
        if len(self.operands) < 2:
            raise ValueError("'and' needs at least two operands")


@dataclass(frozen=True, slots=True)
class Or:
    operands: tuple[Condition, ...]

    def __post_init__(self) -> None:
        if len(self.operands) < 2:
            raise ValueError("'or' needs at least two operands")


@dataclass(frozen=True, slots=True)
class Not:
    operand: Condition


Atom = Union[
    SourceIs,
    SourceIn,
    HasSource,
    HasEvidence,
    PublishedAfter,
    PublishedBefore,
    ChainAnchored,
    ContextEquals,
    ContextDefined,
    AssertionMatches,
]
Condition = Union[Atom, And, Or, Not]
ATOM_TYPES = Atom.__args__  # type: ignore[attr-defined]


@dataclass(frozen=True, slots=True)
class Rule:
    name: str
    effect: Effect
    condition: Condition

    def __post_init__(self) -> None:
        _check_name("rule", self.name)
        if self.effect not in EFFECTS:
            raise ValueError(f"invalid effect {self.effect!r}")


@dataclass(frozen=True, slots=True)
class AgentSet:
    name: str
    members: frozenset[Iri] = frozenset()

    def __post_init__(self) -> None:
        _check_name("set", self.name)


@dataclass(frozen=True, slots=True)
class Policy:
    name: str
    owner: Iri
    default: Effect = "reject"
    rules: tuple[Rule, ...] = ()
    sets: tuple[AgentSet, ...] = ()

    def __post_init__(self) -> None:
        _check_name("policy", self.name)
        if self.default not in EFFECTS:
            raise ValueError(f"invalid default {self.default!r}")


def atoms(cond: Condition) -> list[Atom]:
    """Atoms of ``cond`` in pre-order; an atom's index here is its position."""
    if isinstance(cond, (And, Or)):
        return [a for op in cond.operands for a in atoms(op)]
    if isinstance(cond, Not):
        return atoms(cond.operand)
    return [cond]


__all__ = [
    "And",
    "AgentSet",
    "AssertionMatches",
    "Atom",
    "ChainAnchored",
    "Condition",
    "ContextDefined",
    "ContextEquals",
    "Effect",
    "HasEvidence",
    "HasSource",
    "Mode",
    "Not",
    "Or",
    "Policy",
    "PublishedAfter",
    "PublishedBefore",
    "Rule",
    "SourceIn",
    "SourceIs",
    "atoms",
]
