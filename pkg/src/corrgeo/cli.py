"""
Command line entry point::

    corrgeo analyze STATEFILE [--measures all|E,D,...] [--restarts N] [--tol X]
                              [--ree-terms M] [--seed S] [--format json|csv|table]
    corrgeo sweep SPECFILE --out CSV
    corrgeo selftest

Exit status: 0 success, 2 invalid input, 3 a non-convergence flag was
raised (the report is still written). ``selftest`` exits 1 on failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .errors import CorrGeoError
from .report import (
    CSV_FIELDS,
    QUANTITIES,
    AnalysisOptions,
    SweepSpec,
    full_analysis,
    parse_measures,
    report_row,
    write_sweep,
)
from .search import SearchOptions
from .entanglement import ReeOptions
from .statefile import load_state

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_NONCONVERGED = 3


def _analysis_options(args) -> AnalysisOptions:
    search = SearchOptions(seed=args.seed)
    if args.restarts is not None:
        search = replace(search, restarts=args.restarts)
    if args.tol is not None:
        search = replace(search, tol=args.tol)
    ree = ReeOptions(seed=args.seed, terms=args.ree_terms)
    return AnalysisOptions(parse_measures(args.measures), search, ree)


def _table(report) -> str:
    lines = [f"{'quantity':<20}{'bits':>16}  method"]
    for name in QUANTITIES + ("delta", "mid"):
        mv = getattr(report, name)
        if mv is None:
            continue
        lines.append(f"{name:<20}{mv.value:>16.12g}  {mv.method}")
    for label, v in (
        ("residual_rho", report.residual_rho),
        ("residual_sigma", report.residual_sigma),
        ("subadditivity_gap", report.subadditivity_gap),
    ):
        if v is not None:
            lines.append(f"{label:<20}{v:>16.12g}")
    raised = sorted(k for k, v in report.flags.items() if v)
    lines.append(f"{'flags':<20}{', '.join(raised) or 'none':>16}")
    if report.audit and report.audit["violation"]:
        lines.append("SUBADDITIVITY VIOLATION: T_rho < E + Q + C_sigma beyond tolerance")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    x = load_state(args.statefile)
    report = full_analysis(x, _analysis_options(args))
    if args.format == "json":
        json.dump(report.to_dict(), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    elif args.format == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        w.writerow(report_row(report))
    else:
        print(_table(report))
    return EXIT_NONCONVERGED if report.non_converged else EXIT_OK


def cmd_sweep(args) -> int:
    try:
        data = json.loads(Path(args.specfile).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorrGeoError(f"cannot load sweep spec {args.specfile}: {exc}") from None
    spec = SweepSpec.from_dict(data)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        n = write_sweep(spec, fh)
    print(f"wrote {n} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    rows = run_selftest()
    width = max(len(r.name) for r in rows)
    print(f"{'check':<{width}}  {'value':>12}  {'expected':>12}  {'tol':>8}  result")
    for r in rows:
        print(f"{r.name:<{width}}  {r.value:>12.6g}  {r.expected:>12.6g}  {r.tol:>8.0e}  {'PASS' if r.ok else 'FAIL'}")
    failed = sum(not r.ok for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrgeo", description="Relative-entropy correlation measures of quantum states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log optimizer diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="compute all correlation measures of a state file")
    a.add_argument("statefile")
    a.add_argument("--measures", default="all", help="'all' or a comma list of E,D,Q,C,T,L,delta,mid")
    a.add_argument("--restarts", type=int, default=None, help="basis-search restarts (default 32)")
    a.add_argument("--tol", type=float, default=None, help="basis-search entropy tolerance (default 1e-8)")
    a.add_argument("--ree-terms", type=int, default=None, help="product terms in the separable ansatz (default dim^2)")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--format", choices=("json", "csv", "table"), default="json")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    s.add_argument("specfile")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("selftest", help="check known closed forms and worked examples")
    t.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CorrGeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
