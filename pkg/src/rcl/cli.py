"""Command-line front door.

Subcommands: check, infer, query, snapshot, span, realize, export. All
output is plain UTF-8, one record per line, deterministic for identical
inputs. Exit codes: 0 success, 1 I/O failure, 2 validation errors, 3
unknown query target, 4 procedure not realized.

Model paths are looked up on the filesystem first; a bare name that matches
a bundled fixture (kb_roman.rcl) resolves to the packaged copy, so the
documented examples work from any directory.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from importlib import resources

from .loader import LoadedModel, load_source
from .model import Interval, canonical_export
from .procedures import check_realization, render_report
from .rules import NotARole, UnknownEntity, permitted_activities
from .temporal import EmptyWindow, render_snapshot, render_span, snapshot, span_query

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_UNKNOWN_TARGET = 3
EXIT_NOT_REALIZED = 4


def _read_model_text(path: str) -> str:
    candidate = Path(path)
    if candidate.exists():
        return candidate.read_text("utf-8")
    if candidate.name == path:  # bare names may resolve to bundled fixtures
        bundled = resources.files("rcl").joinpath("fixtures", path)
        if bundled.is_file():
            return bundled.read_text("utf-8")
    raise FileNotFoundError(path)


def _print_diagnostics(model: LoadedModel) -> None:
    for d in model.diagnostics:
        print(f"{d.span.line}:{d.span.column}: {d.severity}: {d.message}", file=sys.stderr)


def _load(path: str) -> tuple[LoadedModel | None, int]:
    try:
        source = _read_model_text(path)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None, EXIT_IO
    model = load_source(source)
    _print_diagnostics(model)
    if model.store is None:
        return model, EXIT_INVALID
    return model, EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    _, status = _load(args.model)
    return status


def _cmd_infer(args: argparse.Namespace) -> int:
    model, status = _load(args.model)
    if status != EXIT_OK:
        return status
    sys.stdout.write(canonical_export(model.closure()))
    return EXIT_OK


def _cmd_export(args: argparse.Namespace) -> int:
    model, status = _load(args.model)
    if status != EXIT_OK:
        return status
    sys.stdout.write(canonical_export(model.store))
    return EXIT_OK


def _cmd_query(args: argparse.Namespace) -> int:
    model, status = _load(args.model)
    if status != EXIT_OK:
        return status
    closure = model.closure()
    try:
        activities = permitted_activities(closure, args.permitted, args.at)
    except (UnknownEntity, NotARole) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_TARGET
    for name in sorted(activities):
        print(name)
    return EXIT_OK


def _cmd_snapshot(args: argparse.Namespace) -> int:
    model, status = _load(args.model)
    if status != EXIT_OK:
        return status
    closure = model.closure()
    sys.stdout.write(render_snapshot(closure, snapshot(closure, args.at)))
    return EXIT_OK


def _cmd_span(args: argparse.Namespace) -> int:
    model, status = _load(args.model)
    if status != EXIT_OK:
        return status
    closure = model.closure()
    try:
        if args.start > args.end:
            raise EmptyWindow(f"empty window [{args.start}, {args.end}]")
        view = span_query(closure, Interval(args.start, args.end))
    except EmptyWindow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(render_span(closure, view))
    return EXIT_OK


def _cmd_realize(args: argparse.Namespace) -> int:
    model, status = _load(args.model)
    if status != EXIT_OK:
        return status
    procedures = model.ast.procedures()
    traces = model.ast.traces()
    if args.procedure not in procedures:
        print(f"error: unknown procedure {args.procedure!r}", file=sys.stderr)
        return EXIT_UNKNOWN_TARGET
    if args.trace not in traces:
        print(f"error: unknown trace {args.trace!r}", file=sys.stderr)
        return EXIT_UNKNOWN_TARGET
    closure = model.closure()
    report = check_realization(closure, procedures[args.procedure], traces[args.trace])
    print(render_report(report, traces[args.trace]))
    return EXIT_OK if report.realized else EXIT_NOT_REALIZED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcl",
        description="Validate, query, and check RCL models of roles, rights, "
        "activities, procedures, and process traces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a model; exit 0 when clean")
    p.add_argument("model")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("infer", help="print the canonical closure")
    p.add_argument("model")
    p.set_defaults(func=_cmd_infer)

    p = sub.add_parser("query", help="permitted activities of a role")
    p.add_argument("model")
    p.add_argument("--permitted", required=True, metavar="ROLE")
    p.add_argument("--at", type=int, default=None, metavar="T")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("snapshot", help="continuant facts holding at a tick")
    p.add_argument("model")
    p.add_argument("--at", type=int, required=True, metavar="T")
    p.set_defaults(func=_cmd_snapshot)

    p = sub.add_parser("span", help="occurrents overlapping a window")
    p.add_argument("model")
    p.add_argument("--from", dest="start", type=int, required=True, metavar="A")
    p.add_argument("--to", dest="end", type=int, required=True, metavar="B")
    p.set_defaults(func=_cmd_span)

    p = sub.add_parser("realize", help="check a trace against a procedure")
    p.add_argument("model")
    p.add_argument("--procedure", required=True, metavar="P")
    p.add_argument("--trace", required=True, metavar="TR")
    p.set_defaults(func=_cmd_realize)

    p = sub.add_parser("export", help="print the canonical base facts")
    p.add_argument("model")
    p.set_defaults(func=_cmd_export)

    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry_point() -> None:
    sys.exit(run())
