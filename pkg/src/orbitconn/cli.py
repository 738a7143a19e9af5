"""Command-line driver: ``orbitconn analyze`` and ``orbitconn theorem``.

Exit codes: 0 analysis completed (feasible or not), 2 bad flags or input,
3 unsupported algebra, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .connection import I, MissingConditionI, parse_conditions
from .lie_core import UnsupportedType, build_algebra, parse_algebra_name
from .orbits import (
    NoTriple,
    NotNilpotent,
    OrbitFileError,
    _minimal_element,
    _regular_element,
    build_context,
    element_from_terms,
    load_orbit_file,
)
from .report import analyze, run_theorem, write_report

EXIT_OK, EXIT_USAGE, EXIT_UNSUPPORTED, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("orbitconn")


class _Usage(Exception):
    pass


def _max_rank(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid rank {s!r}") from None
    if not 1 <= v <= 4:
        raise argparse.ArgumentTypeError("max rank must be between 1 and 4")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orbitconn", description="Invariant connections on nilpotent orbits.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze one orbit")
    a.add_argument("--algebra", required=True, help="A1..A4, B2..B4, C2..C4, D4, G2")
    a.add_argument("--orbit", choices=("minimal", "regular", "custom"), default="minimal")
    a.add_argument("--orbit-file", help="orbit records for --orbit custom")
    a.add_argument("--label", help="record label inside --orbit-file")
    a.add_argument("--conditions", default="I,IIp", help="comma list of I, IIp, adh")
    a.add_argument("--out", help="write the JSON report here")
    a.add_argument("--verbose", action="store_true")

    t = sub.add_parser("theorem", help="sweep minimal and regular orbits")
    t.add_argument("--max-rank", type=_max_rank, default=2)
    t.add_argument("--out", help="write the JSON table here")
    t.add_argument("--verbose", action="store_true")
    return p


def _context(args):
    L = build_algebra(*parse_algebra_name(args.algebra))
    if args.orbit == "minimal":
        return build_context(L, _minimal_element(L), "minimal")
    if args.orbit == "regular":
        return build_context(L, _regular_element(L), "regular")
    if not args.orbit_file:
        raise _Usage("--orbit custom needs --orbit-file")
    records = load_orbit_file(args.orbit_file)
    if args.label is None:
        if len(records) != 1:
            raise _Usage("--label is required when the orbit file has several records")
        label, terms = records[0]
    else:
        found = [r for r in records if r[0] == args.label]
        if not found:
            raise _Usage(f"no record labelled {args.label!r} in {args.orbit_file}")
        label, terms = found[0]
    return build_context(L, element_from_terms(L, terms), label)


def cmd_analyze(args) -> int:
    conds = parse_conditions(args.conditions)
    if I not in conds:
        raise MissingConditionI("condition I is required")
    ctx = _context(args)
    report, _ = analyze(ctx, conds)
    print(report.summary_line())
    if args.out:
        write_report(report, args.out)
    return EXIT_OK


def cmd_theorem(args) -> int:
    def on_row(row):
        print(row.summary_line(), flush=True)
        log.info("%s %s timings(ms) %s", row.algebra, row.orbit, row.timings)

    table = run_theorem(args.max_rank, on_row=on_row)
    print(f"agreement={'true' if table.agreement else 'false'}")
    if args.out:
        write_report(table, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    handler = cmd_analyze if args.command == "analyze" else cmd_theorem
    try:
        return handler(args)
    except UnsupportedType as exc:
        print(f"orbitconn: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except OSError as exc:
        print(f"orbitconn: {exc}", file=sys.stderr)
        return EXIT_IO
    except (_Usage, OrbitFileError, NotNilpotent, NoTriple, ValueError) as exc:
        print(f"orbitconn: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
