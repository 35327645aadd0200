"""Command-line entry point: ``anharmonic {epps,ritz,reproduce-paper}``.

Exit codes: 0 success, 1 a report row failed, 2 bad input (parse or usage),
3 ansatz solver failure, 4 quadrature failure, 5 Ritz convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from .ansatz import AnsatzConfig, AnsatzSolveError, default_exponent_degree, solve
from .polynomial import PolynomialParseError, parse_potential
from .quadrature import QuadratureConfig, QuadratureError, first_order_correction
from .report import PaperReferenceTable, build_report
from .ritz import RitzConfig, RitzError, converge_ground_state

EXIT_OK = 0
EXIT_ROW_FAILED = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_QUADRATURE = 4
EXIT_RITZ = 5


class _UsageError(Exception):
    pass


def _fmt(value) -> str:
    return f"{value:.10g}" if isinstance(value, float) else str(value)


def _emit_record(record: dict, fmt: str, out) -> None:
    flat = {k: v for k, v in record.items() if not isinstance(v, (dict, list))}
    if fmt == "json":
        out.write(json.dumps(record, indent=2) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(flat.keys())
        writer.writerow(repr(v) if isinstance(v, float) else v for v in flat.values())
        out.write(buf.getvalue())
    else:
        width = max(len(k) for k in flat)
        for k, v in flat.items():
            out.write(f"{k.ljust(width)}  {_fmt(v)}\n")


def _parse(text: str):
    try:
        return parse_potential(text)
    except PolynomialParseError as exc:
        raise _UsageError(str(exc)) from exc


def cmd_epps(args, out) -> int:
    V = _parse(args.potential)
    degree = args.degree or default_exponent_degree(V)
    try:
        config = AnsatzConfig(degree, newton_tolerance=args.newton_tol)
        config.validate_for(V)
        quad = QuadratureConfig(relative_tolerance=args.tol)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    try:
        solution = solve(V, config, quad)
    except (AnsatzSolveError, ValueError) as exc:
        print(f"error: ansatz solve failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        result = first_order_correction(V, solution, quad)
    except QuadratureError as exc:
        print(f"error: quadrature failed: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    record = {"potential": args.potential, "exponent_degree": degree, **result.to_dict()}
    if args.format == "json":
        record["ansatz"] = solution.to_dict()
    else:
        for i, c in enumerate(solution.a, start=1):
            record[f"a{i}"] = c
    _emit_record(record, args.format, out)
    return EXIT_OK


def cmd_ritz(args, out) -> int:
    V = _parse(args.potential)
    try:
        kwargs = {"max_basis_size": args.max_basis_size, "frequency": args.frequency}
        if args.tol is not None:
            kwargs["energy_tolerance"] = args.tol
        config = RitzConfig(**kwargs)
        if not V.is_confining():
            raise ValueError("potential must have even degree and a positive leading coefficient")
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    try:
        result = converge_ground_state(V, config)
    except RitzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RITZ
    if args.format == "json":
        _emit_record({"potential": args.potential, **result.to_dict()}, "json", out)
    elif args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["potential", "frequency", "basis_size", "energy"])
        for n, e in result.trace:
            writer.writerow([args.potential, repr(result.frequency), n, repr(e)])
    else:
        out.write(f"potential   {args.potential}\n")
        out.write(f"energy      {_fmt(result.energy)}\n")
        out.write(f"frequency   {_fmt(result.frequency)}\n")
        out.write(f"basis_size  {result.basis_size}\n")
        out.write("trace:\n")
        for n, e in result.trace:
            out.write(f"  {n:5d}  {e:.15g}\n")
    return EXIT_OK


def cmd_reproduce(args, out) -> int:
    try:
        table = PaperReferenceTable.load(args.references)
    except (OSError, ValueError) as exc:
        raise _UsageError(f"cannot read reference data: {exc}") from exc
    quad = QuadratureConfig(relative_tolerance=args.tol) if args.tol else None
    report = build_report(table, quadrature=quad, timestamp=not args.no_timestamp)
    if args.format == "json":
        out.write(report.to_json() + "\n")
    elif args.format == "csv":
        out.write(report.to_csv())
    else:
        out.write(report.to_table())
    return EXIT_OK if report.passed else EXIT_ROW_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anharmonic",
        description="Ground-state energies of 1D polynomial potentials: EPPS perturbation theory and Rayleigh-Ritz.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table", "csv"), default="table")
    common.add_argument("--no-timestamp", action="store_true", help="omit the generation timestamp")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("epps", parents=[common], help="first-order EPPS energy")
    p.add_argument("--potential", required=True, help='e.g. "x^4 - x^2"')
    p.add_argument("--degree", type=int, default=None, help="even exponent degree M (default: smallest valid, at least 4)")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature relative tolerance")
    p.add_argument("--newton-tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_epps)

    p = sub.add_parser("ritz", parents=[common], help="converged Rayleigh-Ritz ground state")
    p.add_argument("--potential", required=True)
    p.add_argument("--tol", type=float, default=None, help="energy convergence tolerance (default 1e-10)")
    p.add_argument("--frequency", type=float, default=None, help="single basis frequency instead of the grid scan")
    p.add_argument("--max-basis-size", type=int, default=400)
    p.set_defaults(func=cmd_ritz)

    p = sub.add_parser("reproduce-paper", parents=[common], help="compare against stored reference energies")
    p.add_argument("--tol", type=float, default=None, help="quadrature relative tolerance")
    p.add_argument("--references", default=None, help="alternative reference data JSON file")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
