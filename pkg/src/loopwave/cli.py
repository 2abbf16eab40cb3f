"""Command-line interface.

``loopwave analyze FILE...`` parses, labels, and classifies every loop of
each file, emitting a text or JSON report.  Exit status: 0 on success, 1
when any file has a syntax error, 2 on an internal failure (for example a
wave that hits its pass ceiling).  ``loopwave exec`` runs the reference
interpreter on one file, for debugging.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .graph import build_graph, seed_usage
from .interp import interpret
from .labels import run_all
from .parallel import classify_all
from .parser import MiniSyntaxError, SourceProgram, parse_program
from .report import Report, emit_json, render_text
from .wave import NonTerminationError


def analyze_source(
    text: str,
    name: str = "<input>",
    *,
    predicates: bool = True,
    max_passes: int = 64,
    trace: list | None = None,
):
    """Full pipeline over one source text; returns (program, graph, store, verdicts)."""
    program = parse_program(SourceProgram(text, name))
    g = build_graph(program)
    usage = seed_usage(g)
    store = run_all(g, usage, predicates=predicates, max_passes=max_passes,
                    trace=trace)
    verdicts = classify_all(store)
    return program, g, store, verdicts


def cmd_analyze(paths: list[str], options: argparse.Namespace, out=sys.stdout) -> int:
    status = 0
    for path in paths:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            print(f"{path}: cannot read: {exc}", file=sys.stderr)
            status = max(status, 1)
            continue
        trace: list | None = [] if options.trace_wave else None
        try:
            _, _, store, verdicts = analyze_source(
                text,
                name=p.name,
                predicates=not options.no_predicates,
                max_passes=options.max_passes,
                trace=trace,
            )
        except MiniSyntaxError as exc:
            report = Report(p.name, error=str(exc))
            _emit(report, options, out)
            print(str(exc), file=sys.stderr)
            status = max(status, 1)
            continue
        except NonTerminationError as exc:
            print(f"{p.name}: internal failure: {exc}", file=sys.stderr)
            status = max(status, 2)
            continue
        report = Report(p.name, verdicts, store, with_labels=options.dump_labels)
        _emit(report, options, out)
        if trace is not None:
            for ev in trace:
                print(
                    f"trace pass={ev.pass_no} v{ev.vertex} -> v{ev.target} "
                    f"changed={'y' if ev.changed else 'n'}",
                    file=out,
                )
    return status


def _emit(report: Report, options: argparse.Namespace, out) -> None:
    if options.format == "json":
        print(emit_json(report), file=out)
    else:
        print(render_text(report), end="", file=out)


def _parse_binding(text: str):
    name, _, value = text.partition("=")
    value = value.strip()
    if value.startswith("["):
        items = [int(x) for x in value.strip("[]").split(",") if x.strip()]
        return name.strip(), items
    return name.strip(), int(value)


def cmd_exec(options: argparse.Namespace, out=sys.stdout) -> int:
    p = Path(options.path)
    try:
        program = parse_program(SourceProgram(p.read_text(encoding="utf-8"), p.name))
    except MiniSyntaxError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    build_graph(program)  # annotate statements with vertex ids
    inputs = dict(_parse_binding(b) for b in options.set or [])
    result = interpret(program, inputs, collect_trace=False)
    for row in result.outputs:
        print(" ".join(str(v) for v in row), file=out)
    if options.state:
        for name in sorted(result.scalars):
            print(f"{name} = {result.scalars[name]}", file=out)
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="loopwave",
        description="Detect loop-level parallelism in mini-language programs.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyze files and classify their loops")
    an.add_argument("paths", nargs="+")
    an.add_argument("--format", choices=["text", "json"], default="text")
    an.add_argument("--dump-labels", action="store_true",
                    help="include the per-vertex label table")
    an.add_argument("--trace-wave", action="store_true",
                    help="print one line per wave transfer firing")
    an.add_argument("--max-passes", type=int, default=64,
                    help="wave pass ceiling (non-termination guard)")
    an.add_argument("--no-predicates", action="store_true",
                    help="disable the predicate passes (ablation)")

    ex = sub.add_parser("exec", help="run a program in the reference interpreter")
    ex.add_argument("path")
    ex.add_argument("--set", action="append", metavar="NAME=VALUE",
                    help="bind a scalar (K=3) or array (Y=[1,2,3])")
    ex.add_argument("--state", action="store_true",
                    help="print final scalar values")

    options = ap.parse_args(argv)
    if options.command == "analyze":
        return cmd_analyze(options.paths, options)
    return cmd_exec(options)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
