"""Command-line interface: ``gendicke {solve,sweep,critical,ed}``.

Exit codes: 0 success, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .errors import DomainError, SolverError
from .model import CanonicalParams
from .sweep import (
    ED_COLUMNS,
    TD_COLUMNS,
    SweepSpec,
    format_rows,
    locate_transition,
    run_ed,
    run_solve,
    run_sweep,
    snap_theta,
)
from .tdlimit import critical_coupling

#: Typed radians are rounded by the user; treat anything this close to pi/2 as pi/2.
TYPED_ANGLE_SNAP = 1e-6

EXIT_USAGE = 2
EXIT_SOLVER = 3


def _parse_range(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from None


def _parse_js(text: str) -> list[float]:
    try:
        return [float(Fraction(tok)) for tok in text.split(",") if tok.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated spins like 2,4,3/2, got {text!r}") from None


def _add_model_args(parser: argparse.ArgumentParser, need_lambda: bool = True):
    parser.add_argument("--omega", type=float, default=1.0, help="boson frequency (default 1)")
    parser.add_argument("--Omega", type=float, default=1.0, help="spin splitting (default 1)")
    ang = parser.add_mutually_exclusive_group()
    ang.add_argument("--theta", type=float, help="coupling angle in radians (default pi/2)")
    ang.add_argument("--theta-deg", type=float, help="coupling angle in degrees")
    if need_lambda:
        parser.add_argument("--lambda", dest="lam", type=float, default=0.0, help="coupling strength")


def _add_output_args(parser: argparse.ArgumentParser):
    parser.add_argument("--out", help="output file (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gendicke", description="Generalised Dicke model: thermodynamic limit and exact diagonalization."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="all physical branches at one parameter point")
    _add_model_args(p)
    _add_output_args(p)

    p = sub.add_parser("sweep", help="tabulate branches along lambda or theta")
    _add_model_args(p)
    p.add_argument("--axis", choices=("lambda", "theta"), default="lambda")
    p.add_argument("--range", type=_parse_range, required=True, metavar="LO:HI:N")
    p.add_argument("--workers", type=int, default=1)
    _add_output_args(p)

    p = sub.add_parser("critical", help="locate the gap closing in lambda")
    _add_model_args(p, need_lambda=False)
    _add_output_args(p)

    p = sub.add_parser("ed", help="finite-j exact diagonalization convergence table")
    _add_model_args(p)
    p.add_argument("--j", type=_parse_js, default=[2.0, 4.0, 8.0, 16.0], help="spins, e.g. 2,4,8,16")
    cut = p.add_mutually_exclusive_group()
    cut.add_argument("--nmax", type=int, help="fixed Fock cutoff")
    cut.add_argument("--nmax-auto", action="store_true", help="cutoff from the displacement (default)")
    _add_output_args(p)
    return parser


def _theta(args) -> float:
    if args.theta_deg is not None:
        theta = math.radians(args.theta_deg)
    else:
        theta = math.pi / 2 if args.theta is None else args.theta
    return snap_theta(theta, TYPED_ANGLE_SNAP)


def _params(args, lam: float | None = None) -> CanonicalParams:
    return CanonicalParams(
        omega=args.omega, Omega=args.Omega, theta=_theta(args),
        lam=args.lam if lam is None else lam,
    )


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise DomainError(f"cannot write {out}: {exc}") from exc


def _meta(p: CanonicalParams, **extra) -> dict:
    return {"omega": p.omega, "Omega": p.Omega, "theta": p.theta, "lambda": p.lam, **extra}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            p = _params(args)
            _emit(format_rows(run_solve(p), TD_COLUMNS, _meta(p), args.format), args.out)
        elif args.command == "sweep":
            lo, hi, n = args.range
            p = _params(args, lam=max(args.lam, 0.0))
            spec = SweepSpec(args.axis, lo, hi, n, p)
            rows = run_sweep(spec, workers=args.workers)
            meta = _meta(p, axis=args.axis, range=f"{lo}:{hi}:{n}")
            meta.pop("lambda" if args.axis == "lambda" else "theta")
            _emit(format_rows(rows, TD_COLUMNS, meta, args.format), args.out)
        elif args.command == "critical":
            theta = _theta(args)
            CanonicalParams(args.omega, args.Omega, theta, 0.0)
            lam_c = critical_coupling(args.omega, args.Omega)
            lam_star = locate_transition(args.omega, args.Omega, theta)
            row = {"theta": theta, "lambda_c": lam_c, "lambda_star": "none" if lam_star is None else lam_star}
            meta = {"omega": args.omega, "Omega": args.Omega}
            if args.format == "json":
                _emit(json.dumps({"meta": meta, **row}, indent=2) + "\n", args.out)
            else:
                _emit(format_rows([row], list(row), meta, "csv"), args.out)
        elif args.command == "ed":
            p = _params(args)
            rows = run_ed(p, args.j, n_max=args.nmax)
            meta = _meta(p, nmax="auto" if args.nmax is None else args.nmax)
            _emit(format_rows(rows, ED_COLUMNS, meta, args.format), args.out)
    except DomainError as exc:
        print(f"gendicke {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"gendicke {args.command}: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
