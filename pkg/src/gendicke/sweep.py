"""Tabulated runs behind the command-line front end.

Every function returns plain rows (lists of dicts) so the same data can be
written as CSV or JSON, or inspected directly in tests.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Literal

import numpy as np

from . import __version__
from .errors import DomainError, SolverError
from .finite_j import BasisSpec, build_hamiltonian, frobenius_norm, solve_finite_j
from .model import HALF_PI, CanonicalParams
from .tdlimit import (
    ANGLE_SNAP,
    RESIDUAL_TOL,
    critical_coupling,
    displacement_residual,
    ground_branch,
    solve,
)

TD_COLUMNS = [
    "theta", "lambda", "branch", "x_a", "x_b",
    "eps_minus", "eps_plus", "e_g", "jz_per_j", "photons_per_j", "residual",
]
ED_COLUMNS = [
    "j", "n_max", "E0_per_j", "gs_jz_per_j", "gs_photons_per_j",
    "gs_parity", "parity_comm_norm", "parity_comm_rel", "converged",
]


def snap_theta(theta: float, tol: float = ANGLE_SNAP) -> float:
    """Replace angles within ``tol`` of pi/2 by pi/2 exactly."""
    return HALF_PI if abs(theta - HALF_PI) <= tol else theta


def run_solve(p: CanonicalParams) -> list[dict]:
    """One row per physical branch, each re-validated before it is returned."""
    rows = []
    for sp in solve(p):
        sol = sp.solution
        resid = float(displacement_residual(p, sol.x_b))
        if abs(resid) >= RESIDUAL_TOL or abs(sp.jz_per_j - (sol.x_b**2 - 1.0)) > 1e-12:
            raise SolverError(f"self-consistency check failed at theta={p.theta}, lambda={p.lam}")
        rows.append({
            "theta": p.theta, "lambda": p.lam, "branch": sol.branch_tag,
            "x_a": sol.x_a, "x_b": sol.x_b,
            "eps_minus": sp.eps_minus, "eps_plus": sp.eps_plus, "e_g": sp.e_g,
            "jz_per_j": sp.jz_per_j, "photons_per_j": sp.photons_per_j,
            "residual": resid,
        })
    return rows


@dataclass(frozen=True)
class SweepSpec:
    """Grid along one parameter with the other three held fixed."""

    axis: Literal["lambda", "theta"]
    lo: float
    hi: float
    count: int
    base: CanonicalParams

    def __post_init__(self):
        if self.axis not in ("lambda", "theta"):
            raise DomainError(f"axis must be 'lambda' or 'theta', got {self.axis!r}")
        if not self.lo < self.hi:
            raise DomainError(f"range needs lo < hi, got {self.lo}:{self.hi}")
        if self.count < 2:
            raise DomainError(f"need at least 2 grid points, got {self.count}")
        if self.axis == "theta" and not (0 <= self.lo and self.hi <= math.pi):
            raise DomainError("theta range must lie in [0, pi]")
        if self.axis == "lambda" and self.lo < 0:
            raise DomainError("lambda range must be non-negative")

    def points(self) -> list[CanonicalParams]:
        values = np.linspace(self.lo, self.hi, self.count)
        if self.axis == "lambda":
            return [replace(self.base, lam=float(v)) for v in values]
        return [replace(self.base, theta=snap_theta(float(v))) for v in values]


def _solve_point(p: CanonicalParams) -> list[dict]:
    try:
        return run_solve(p)
    except SolverError as exc:
        raise SolverError(f"sweep point theta={p.theta!r}, lambda={p.lam!r}: {exc}") from exc


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """Rows for every grid point and physical branch, in grid order."""
    points = spec.points()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_solve_point, points))
    else:
        chunks = [_solve_point(p) for p in points]
    return [row for chunk in chunks for row in chunk]


def soft_mode(p: CanonicalParams) -> float:
    return min(sp.eps_minus for sp in solve(p))


def locate_transition(
    omega: float, Omega: float, theta: float, gap_tol: float = 1e-6, lam_max_factor: float = 10.0
) -> float | None:
    """Coupling at which the lower excitation energy closes, or ``None``.

    Scans ``lambda`` over ``[0, lam_max_factor * lambda_c]`` for the smallest
    gap, then narrows the bracket around it by repeated interval reduction.
    """
    lam_c = critical_coupling(omega, Omega)
    theta = snap_theta(theta)
    gap = lambda lam: soft_mode(CanonicalParams(omega, Omega, theta, lam))  # noqa: E731
    grid = np.linspace(0.0, lam_max_factor * lam_c, 201)
    vals = [gap(float(x)) for x in grid]
    i = int(np.argmin(vals))
    lo, hi = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, len(grid) - 1)])
    while hi - lo > 1e-15 * max(1.0, hi):
        d = 0.25 * (hi - lo)
        a, b = lo + d, hi - d
        if gap(b) < gap(a):
            lo = a
        else:
            hi = b
    lam_star = 0.5 * (lo + hi)
    return lam_star if gap(lam_star) < gap_tol else None


def run_ed(p: CanonicalParams, js: Iterable[float], n_max: int | None = None) -> list[dict]:
    """Finite-j convergence table followed by a thermodynamic-limit reference row."""
    rows = []
    for j in js:
        res = solve_finite_j(p, j, n_max=n_max)
        basis = BasisSpec(j, res.n_max)
        H = build_hamiltonian(p, basis, sparse=True)
        rows.append({
            "j": basis.j, "n_max": res.n_max, "E0_per_j": res.gs_energy_per_j,
            "gs_jz_per_j": res.gs_jz_per_j, "gs_photons_per_j": res.gs_photons_per_j,
            "gs_parity": res.gs_parity, "parity_comm_norm": res.parity_commutator_norm,
            "parity_comm_rel": res.parity_commutator_norm / frobenius_norm(H),
            "converged": res.converged,
        })
    td = ground_branch(p)
    rows.append({
        "j": "inf", "n_max": "", "E0_per_j": td.e_g, "gs_jz_per_j": td.jz_per_j,
        "gs_photons_per_j": td.photons_per_j, "gs_parity": "", "parity_comm_norm": "",
        "parity_comm_rel": "", "converged": "",
    })
    return rows


def format_rows(rows: list[dict], columns: list[str], meta: dict, fmt: str = "csv") -> str:
    """Serialize rows; CSV carries ``meta`` as ``#`` comment lines."""
    meta = {"version": __version__, **meta}
    if fmt == "json":
        return json.dumps({"meta": meta, "columns": columns, "rows": rows}, indent=2) + "\n"
    if fmt != "csv":
        raise DomainError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    buf.write("# gendicke " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
