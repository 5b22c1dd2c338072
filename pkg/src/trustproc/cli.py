"""Command-line interface.

Exit codes: 0 success, 1 data error (bad document, unknown claim),
2 policy error (parse or check failure), 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from collections.abc import Sequence
from typing import TextIO
from dataclasses import dataclass, field
from pathlib import Path

from .chain import UnknownClaim
from .engine import Context, filter, publish_filter
from .engine import explain as render_explanation
from .nquads import DocumentSyntaxError
from .policy import (
    AgentSet,
    And,
    ChainAnchored,
    Condition,
    Not,
    Or,
    ParseError,
    Policy,
    check_policy,
    parse_policy,
    parse_sets,
)
from .store import Store, ValidationFailed
from .terms import InvalidIri, Iri
from .vocab import DEFAULT_VOCABULARY, Vocabulary

log = logging.getLogger("trustproc")

EXIT_OK = 0
EXIT_DATA = 1
EXIT_POLICY = 2
EXIT_IO = 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    ingest: list[str] = field(default_factory=list)
    policy: str | None = None
    context: str | None = None
    sets: str | None = None
    roots_set: str | None = None
    out: str | None = None
    requester: str | None = None
    vocab_attribution: str | None = None
    vocab_derivation: str | None = None
    vocab_published: str | None = None

    @classmethod
    def load(cls, path: str) -> RunConfig:
        """Read a JSON config; relative paths resolve against its directory."""
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_IO, f"config {path} is not valid JSON: {exc}") from None
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known - {"vocab"}
        if unknown:
            raise CliError(EXIT_IO, f"config {path}: unknown keys {sorted(unknown)}")
        for key, value in (raw.pop("vocab", None) or {}).items():
            raw[f"vocab_{key}"] = value
        base = Path(path).parent

        def rel(p: str) -> str:
            return str(base / p)

        cfg = cls(**raw)
        cfg.ingest = [rel(p) for p in cfg.ingest]
        for name in ("policy", "context", "sets", "out"):
            value = getattr(cfg, name)
            if value is not None:
                setattr(cfg, name, rel(value))
        return cfg

    def merged(self, args: argparse.Namespace) -> RunConfig:
        """Flags override file values."""
        updates = {}
        for f in dataclasses.fields(self):
            value = getattr(args, f.name, None)
            if value not in (None, []):
                updates[f.name] = value
        return dataclasses.replace(self, **updates)

    def vocabulary(self) -> Vocabulary:
        overrides = {}
        for name in ("attribution", "derivation", "published"):
            raw = getattr(self, f"vocab_{name}")
            if raw is not None:
                try:
                    overrides[name] = Iri(raw)
                except InvalidIri as exc:
                    raise CliError(EXIT_IO, f"--vocab-{name}: {exc}") from None
        return dataclasses.replace(DEFAULT_VOCABULARY, **overrides)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None


def _ingest_all(store: Store, files: Sequence[str], reports: TextIO) -> bool:
    """Ingest each file as its own all-or-nothing document."""
    ok = True
    for path in files:
        text = _read(path)
        try:
            report = store.ingest_document(text)
        except DocumentSyntaxError as exc:
            print(f"{path}: syntax error at {exc}", file=sys.stderr)
            ok = False
        except ValidationFailed as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            for v in exc.violations:
                print(f"  {v}", file=sys.stderr)
            ok = False
        else:
            print(f"{path}: {report.summary()}", file=reports)
    return ok


def rebind_roots(cond: Condition, name: str) -> Condition:
    if isinstance(cond, ChainAnchored):
        return dataclasses.replace(cond, roots=name)
    if isinstance(cond, (And, Or)):
        return type(cond)(tuple(rebind_roots(op, name) for op in cond.operands))
    if isinstance(cond, Not):
        return Not(rebind_roots(cond.operand, name))
    return cond


def _load_policy(cfg: RunConfig) -> tuple[Policy, dict[str, AgentSet]]:
    if cfg.policy is None:
        raise CliError(EXIT_POLICY, "no policy given (--policy)")
    text = _read(cfg.policy)
    try:
        policy = parse_policy(text)
    except ParseError as exc:
        raise CliError(EXIT_POLICY, f"{cfg.policy}: {exc}") from None
    sets: dict[str, AgentSet] = {}
    if cfg.sets is not None:
        try:
            for s in parse_sets(_read(cfg.sets)):
                if s.name in sets:
                    raise CliError(EXIT_POLICY, f"{cfg.sets}: set {s.name} declared twice")
                sets[s.name] = s
        except ParseError as exc:
            raise CliError(EXIT_POLICY, f"{cfg.sets}: {exc}") from None
    if cfg.roots_set is not None:
        policy = dataclasses.replace(
            policy,
            rules=tuple(dataclasses.replace(r, condition=rebind_roots(r.condition, cfg.roots_set)) for r in policy.rules),
        )
    diagnostics = check_policy(policy, sets)
    if diagnostics:
        raise CliError(EXIT_POLICY, "\n".join(f"{cfg.policy}: {d}" for d in diagnostics))
    return policy, sets


def _load_context(cfg: RunConfig) -> Context:
    if cfg.context is None:
        return Context()
    try:
        return Context.from_lines(_read(cfg.context))
    except ValueError as exc:
        raise CliError(EXIT_DATA, f"{cfg.context}: {exc}") from None


def _evaluate(cfg: RunConfig):
    vocab = cfg.vocabulary()
    policy, sets = _load_policy(cfg)
    ctx = _load_context(cfg)
    store = Store()
    # keep stdout for the summary line
    if not _ingest_all(store, cfg.ingest, sys.stderr):
        raise CliError(EXIT_DATA, "one or more documents were rejected")
    snap = store.snapshot()
    if cfg.requester is not None:
        try:
            requester = Iri(cfg.requester)
        except InvalidIri as exc:
            raise CliError(EXIT_DATA, f"--requester: {exc}") from None
        return publish_filter(snap, policy, sets, requester, ctx, vocab)
    return filter(snap, policy, sets, ctx, vocab)


def cmd_ingest(args: argparse.Namespace) -> int:
    store = Store(log_path=args.log) if args.log else Store()
    return EXIT_OK if _ingest_all(store, args.files, sys.stdout) else EXIT_DATA


def cmd_policy_check(args: argparse.Namespace) -> int:
    cfg = _config(args)
    _load_policy(cfg)
    print(f"{cfg.policy}: ok")
    return EXIT_OK


def cmd_filter(args: argparse.Namespace) -> int:
    cfg = _config(args)
    result = _evaluate(cfg)
    report = result.serialize()
    if cfg.out is not None:
        try:
            Path(cfg.out).write_text(report, encoding="utf-8")
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {cfg.out}: {exc}") from None
    else:
        sys.stdout.write(report)
        print(result.summary(), file=sys.stderr)
        return EXIT_OK
    print(result.summary())
    return EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    cfg = _config(args)
    try:
        claim = Iri(args.explain)
    except InvalidIri as exc:
        raise CliError(EXIT_DATA, f"--explain: {exc}") from None
    result = _evaluate(cfg)
    decision = result.decisions.get(claim)
    if decision is None:
        raise CliError(EXIT_DATA, str(UnknownClaim(claim)))
    sys.stdout.write(render_explanation(decision))
    return EXIT_OK


def _config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    cfg = base.merged(args)
    for path in [*cfg.ingest, cfg.policy, cfg.context, cfg.sets]:
        if path is not None and not Path(path).is_file():
            raise CliError(EXIT_IO, f"no such file: {path}")
    return cfg


def _add_run_options(p: argparse.ArgumentParser, *, needs_data: bool) -> None:
    p.add_argument("--config", metavar="FILE", help="JSON run configuration; flags override it")
    p.add_argument("--policy", metavar="FILE", help="policy document (.tpol)")
    p.add_argument("--sets", metavar="FILE", help="extra agent set declarations")
    p.add_argument("--roots-set", dest="roots_set", metavar="NAME", help="anchor every chain condition in set NAME")
    if not needs_data:
        return
    p.add_argument("--ingest", nargs="+", default=[], metavar="FILE", help="N-Quads documents to load")
    p.add_argument("--context", metavar="FILE", help="context as key=value lines")
    p.add_argument("--requester", metavar="IRI", help="run as the publisher-side filter for this requester")
    p.add_argument("--vocab-attribution", dest="vocab_attribution", metavar="IRI")
    p.add_argument("--vocab-derivation", dest="vocab_derivation", metavar="IRI")
    p.add_argument("--vocab-published", dest="vocab_published", metavar="IRI")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trustproc", description="Provenance-aware trust filtering of nanopublications.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and validate documents")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("--log", metavar="FILE", help="append accepted batches to this log")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("check", help="parse and check a policy")
    _add_run_options(p, needs_data=False)
    p.set_defaults(func=cmd_policy_check)

    p = sub.add_parser("filter", help="compute Trusted Data and write the report")
    _add_run_options(p, needs_data=True)
    p.add_argument("--out", metavar="FILE", help="report path (default: standard output)")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("explain", help="explain the decision for one claim")
    _add_run_options(p, needs_data=True)
    p.add_argument("--explain", required=True, metavar="CLAIM_IRI")
    p.set_defaults(func=cmd_explain)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"trustproc: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
