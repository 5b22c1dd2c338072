"""Trust policy language: syntax tree, parser, printer, checker."""

from .ast import *  # noqa: F401,F403
from .ast import __all__ as _ast_all
from .check import Diagnostic, check_policy, resolve_sets
from .parser import ParseError, parse_policy, parse_sets
from .printer import print_atom, print_condition, print_policy

__all__ = [
    *_ast_all,
    "Diagnostic",
    "ParseError",
    "check_policy",
    "parse_policy",
    "parse_sets",
    "print_atom",
    "print_condition",
    "print_policy",
    "resolve_sets",
]
