"""Thermodynamic-limit (j -> infinity) solution of ``H_theta``.

All quantities are scaled by the spin length: the spin boson is displaced by
``sqrt(beta) = x_b sqrt(j)`` and the field by ``sqrt(alpha) = x_a sqrt(j)``,
with ``b = x_b**2 = beta / j`` restricted to ``[0, 2)``.  In these variables
the displacement condition and every coefficient of the effective quadratic
Hamiltonian are independent of j.

Pipeline used by :func:`solve`:

1. find every stationary displacement ``x_b`` (:func:`solve_displacements`),
2. build the effective two-mode form for each (:func:`quadratic_form`),
3. drop candidates with imaginary excitation energies and those whose
   ground-state energy is not the lowest (:func:`classify_branches`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, SolverError
from .model import HALF_PI, CanonicalParams
from .quadratic_boson import ExcitationPair, QuadraticForm, Unstable, excitation_energies

log = logging.getLogger(__name__)

BranchTag = Literal["normal", "displaced_plus", "displaced_minus", "unique"]
Validity = Literal["physical", "unstable", "spurious"]

SQRT2 = math.sqrt(2.0)
#: Distance kept from the Holstein-Primakoff breakdown at |x_b| = sqrt(2).
EDGE_GUARD = 1e-9
RESIDUAL_TOL = 1e-12
DEDUP_TOL = 1e-9
SPURIOUS_RTOL = 1e-10
ANGLE_SNAP = 1e-12
DEFAULT_GRID_CELLS = 2048


@dataclass(frozen=True)
class DisplacementSolution:
    """A stationary displacement in scaled units.

    Attributes:
        x_b: signed sqrt(beta / j).
        x_a: signed sqrt(alpha / j); same sign as ``x_b``.
        b: beta / j.
        branch_tag: which family the root belongs to.
        validity: ``physical``, ``unstable`` or ``spurious``; ``None`` until
            classified.
    """

    x_b: float
    x_a: float
    b: float
    branch_tag: BranchTag = "unique"
    validity: Validity | None = None


@dataclass(frozen=True)
class TdSpectrum:
    eps_minus: float
    eps_plus: float
    e_g: float
    jz_per_j: float
    photons_per_j: float
    solution: DisplacementSolution


def is_dicke(p: CanonicalParams) -> bool:
    return abs(p.theta - HALF_PI) <= ANGLE_SNAP


def is_aligned(p: CanonicalParams) -> bool:
    return p.theta <= ANGLE_SNAP


def critical_coupling(omega: float, Omega: float) -> float:
    """Coupling at which the normal phase of the Dicke model softens."""
    if not (omega > 0 and Omega > 0):
        raise DomainError(f"omega and Omega must be positive, got {omega}, {Omega}")
    return 0.5 * math.sqrt(omega * Omega)


def _check_x(x_b):
    if np.any(np.abs(x_b) >= SQRT2):
        raise DomainError(f"|x_b| must be below sqrt(2), got {x_b}")


def displacement_residual(p: CanonicalParams, x_b):
    """Scaled stationarity condition F(x_b); zero at every admissible displacement.

    Works elementwise on arrays.  F equals ``-1/2 dE_G/dx_b``, so its zeros are
    the stationary points of the mean-field energy.
    """
    x_b = np.asarray(x_b, dtype=float)
    _check_x(x_b)
    b = x_b * x_b
    sin_t, cos_t = math.sin(p.theta), math.cos(p.theta)
    out = (
        (4.0 * p.lam**2 / p.omega) * (1.0 - b) * x_b
        - p.Omega * sin_t * x_b
        + p.Omega * cos_t * (1.0 - b) / np.sqrt(2.0 - b)
    )
    return out if out.ndim else float(out)


def field_displacement(p: CanonicalParams, x_b: float) -> float:
    """x_a that removes the term linear in the field operators."""
    b = x_b * x_b
    return (2.0 * p.lam / p.omega) * x_b * math.sqrt((2.0 - b) / 2.0)


def ground_state_energy(p: CanonicalParams, x_b: float) -> float:
    """Mean-field energy per j at displacement ``x_b``.

    The coupling term enters with a minus sign: it is what makes the displaced
    field lower the energy.
    """
    _check_x(x_b)
    b = x_b * x_b
    return (
        p.Omega * math.sin(p.theta) * (b - 1.0)
        - (2.0 * p.lam**2 / p.omega) * b * (2.0 - b)
        - p.Omega * math.cos(p.theta) * x_b * math.sqrt(2.0 - b)
    )


def _make_solution(p: CanonicalParams, x_b: float, tag: BranchTag = "unique") -> DisplacementSolution:
    return DisplacementSolution(x_b=x_b, x_a=field_displacement(p, x_b), b=x_b * x_b, branch_tag=tag)


def _bracket_roots(p: CanonicalParams, cells: int) -> list[float]:
    lo, hi = -SQRT2 + EDGE_GUARD, SQRT2 - EDGE_GUARD
    xs = np.linspace(lo, hi, cells + 1)
    fs = displacement_residual(p, xs)
    f = lambda x: displacement_residual(p, x)  # noqa: E731
    roots: list[float] = []
    for i in range(cells):
        if fs[i] == 0.0:
            roots.append(float(xs[i]))
        elif fs[i] * fs[i + 1] < 0:
            roots.append(brentq(f, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    if fs[-1] == 0.0:
        roots.append(float(xs[-1]))

    # tangential (even-multiplicity) roots produce no sign change; look for
    # interior minima of |F| that touch zero
    af = np.abs(fs)
    for i in range(1, cells):
        if af[i] <= af[i - 1] and af[i] <= af[i + 1] and fs[i - 1] * fs[i + 1] > 0:
            res = minimize_scalar(
                lambda x: abs(f(x)), bounds=(xs[i - 1], xs[i + 1]), method="bounded",
                options={"xatol": 1e-14},
            )
            if abs(f(res.x)) < RESIDUAL_TOL:
                roots.append(float(res.x))
    return roots


def _dedup(roots: list[float]) -> list[float]:
    out: list[float] = []
    for x in sorted(roots):
        if not out or abs(x - out[-1]) > DEDUP_TOL:
            out.append(x)
    return out


def _accept_roots(p: CanonicalParams, roots: list[float]) -> list[float]:
    kept = []
    for x in roots:
        resid = abs(displacement_residual(p, x))
        if resid < RESIDUAL_TOL:
            kept.append(x)
        else:
            # only happens next to b = 2, where F is steep and unphysical anyway
            log.debug("discarding root x_b=%r with residual %.3g (b=%.12g)", x, resid, x * x)
    return kept


def stationary_displacements(p: CanonicalParams, cells: int = DEFAULT_GRID_CELLS) -> list[DisplacementSolution]:
    """All real roots of :func:`displacement_residual`, unclassified."""
    if p.Omega == 0 and p.lam == 0:
        raise DomainError("Omega and lambda both zero: every displacement is stationary")
    if is_dicke(p):
        sols = [_make_solution(p, 0.0, "normal")]
        mu = p.omega * p.Omega / (4.0 * p.lam**2) if p.lam > 0 else math.inf
        if mu < 1.0:
            x = math.sqrt(1.0 - mu)
            sols += [_make_solution(p, x, "displaced_plus"), _make_solution(p, -x, "displaced_minus")]
        return sols
    roots = _accept_roots(p, _dedup(_bracket_roots(p, cells)))
    return [_make_solution(p, x) for x in roots]


def quadratic_form(p: CanonicalParams, sol: DisplacementSolution) -> QuadraticForm:
    """Coefficients of the effective quadratic Hamiltonian around ``sol``.

    Uses the signed product ``x_a x_b`` (always >= 0) for the
    ``sqrt(alpha beta)`` factors and signed ``x_b`` for ``sqrt(beta)``.
    """
    x_b, x_a = sol.x_b, sol.x_a
    b = x_b * x_b
    if b >= 2.0:
        raise DomainError(f"b = x_b**2 must be below 2, got {b}")
    sin_t, cos_t = math.sin(p.theta), math.cos(p.theta)
    k = 2.0 - b
    sqk = math.sqrt(k)
    xx = x_a * x_b
    omega_b = p.Omega * sin_t + 2.0 * p.lam * xx / math.sqrt(2.0 * k) + 0.5 * p.Omega * cos_t * x_b / sqk
    s = (
        p.lam * xx * (4.0 - b) / (2.0 * SQRT2 * k**1.5)
        + 0.25 * p.Omega * cos_t * (x_b / sqk) * (1.0 + b / (2.0 * k))
    )
    r = SQRT2 * p.lam * (1.0 - b) / sqk
    return QuadraticForm(omega_a=p.omega, omega_b_tilde=omega_b, s=s, r=r, e_g=ground_state_energy(p, x_b))


def _spectrum(sol: DisplacementSolution, q: QuadraticForm, ex: ExcitationPair) -> TdSpectrum:
    return TdSpectrum(
        eps_minus=ex.eps_minus,
        eps_plus=ex.eps_plus,
        e_g=q.e_g,
        jz_per_j=sol.b - 1.0,
        photons_per_j=sol.x_a**2,
        solution=sol,
    )


def classify_branches(
    p: CanonicalParams, sols: list[DisplacementSolution]
) -> list[tuple[DisplacementSolution, QuadraticForm, ExcitationPair | Unstable]]:
    """Attach a validity to each candidate.

    A candidate is ``unstable`` if an excitation energy is imaginary.  Of the
    rest, any whose ground-state energy exceeds the lowest one by more than
    ``SPURIOUS_RTOL * max(1, |E_min|)`` is ``spurious``; degenerate minima are
    all ``physical``.
    """
    staged = []
    for sol in sols:
        q = quadratic_form(p, sol)
        staged.append((sol, q, excitation_energies(q)))
    stable = [q.e_g for _, q, ex in staged if isinstance(ex, ExcitationPair)]
    e_min = min(stable) if stable else math.inf
    tol = SPURIOUS_RTOL * max(1.0, abs(e_min))
    out = []
    for sol, q, ex in staged:
        if isinstance(ex, Unstable):
            validity: Validity = "unstable"
        elif q.e_g > e_min + tol:
            validity = "spurious"
        else:
            validity = "physical"
        out.append((replace(sol, validity=validity), q, ex))
    return out


def solve_displacements(p: CanonicalParams, cells: int = DEFAULT_GRID_CELLS) -> list[DisplacementSolution]:
    """Every stationary displacement, classified.

    Raises:
        SolverError: if none of them is physical.
    """
    classified = classify_branches(p, stationary_displacements(p, cells))
    if not any(sol.validity == "physical" for sol, _, _ in classified):
        raise SolverError(f"no physical displacement found for {p}")
    return [sol for sol, _, _ in classified]


def solve(p: CanonicalParams, include_rejected: bool = False, cells: int = DEFAULT_GRID_CELLS):
    """Physical thermodynamic-limit branches of ``p``.

    One branch away from theta = pi/2; at theta = pi/2 one below the critical
    coupling and two degenerate mirror branches above it.

    With ``include_rejected=True`` the return value is instead the full list
    of ``(solution, quadratic_form, excitations)`` triples, rejected ones
    included.
    """
    classified = classify_branches(p, stationary_displacements(p, cells))
    if include_rejected:
        return classified
    out = [_spectrum(sol, q, ex) for sol, q, ex in classified if sol.validity == "physical"]
    if not out:
        raise SolverError(f"no physical branch found for {p}")
    return out


def ground_branch(p: CanonicalParams) -> TdSpectrum:
    """The physical branch with the largest x_b (the first of a degenerate pair)."""
    return max(solve(p), key=lambda sp: sp.solution.x_b)


# --- closed forms -------------------------------------------------------------


def normal_phase(p: CanonicalParams) -> TdSpectrum:
    """Undisplaced Dicke branch, valid for lambda <= lambda_c."""
    w, w0, lam = p.omega, p.Omega, p.lam
    root = math.sqrt((w0**2 - w**2) ** 2 + 16.0 * lam**2 * w * w0)
    minus_sq = 0.5 * (w**2 + w0**2 - root)
    plus_sq = 0.5 * (w**2 + w0**2 + root)
    if minus_sq < -1e-12 * max(w**2, w0**2):
        raise DomainError(f"normal phase unstable at lambda={lam} > lambda_c")
    sol = DisplacementSolution(0.0, 0.0, 0.0, "normal", "physical")
    return TdSpectrum(math.sqrt(max(minus_sq, 0.0)), math.sqrt(plus_sq), -w0, -1.0, 0.0, sol)


def superradiant_phase(p: CanonicalParams) -> list[TdSpectrum]:
    """The two mirror-image displaced Dicke branches, valid for lambda >= lambda_c."""
    w, w0, lam = p.omega, p.Omega, p.lam
    if lam == 0:
        raise DomainError("superradiant phase needs lambda > 0")
    mu = w * w0 / (4.0 * lam**2)
    if mu > 1.0:
        raise DomainError(f"superradiant phase requires lambda >= lambda_c (mu={mu})")
    bmode_sq = (w0 / mu) ** 2
    root = math.sqrt((bmode_sq - w**2) ** 2 + 4.0 * w**2 * w0**2)
    minus_sq = 0.5 * (bmode_sq + w**2 - root)
    plus_sq = 0.5 * (bmode_sq + w**2 + root)
    e_g = -(2.0 * lam**2 / w + w0**2 * w / (8.0 * lam**2))
    x_b = math.sqrt(1.0 - mu)
    x_a = (2.0 * lam / w) * math.sqrt(0.5 * (1.0 - mu**2))
    out = []
    for sign, tag in ((1.0, "displaced_plus"), (-1.0, "displaced_minus")):
        sol = DisplacementSolution(sign * x_b, sign * x_a, 1.0 - mu, tag, "physical")
        out.append(TdSpectrum(math.sqrt(max(minus_sq, 0.0)), math.sqrt(plus_sq), e_g, -mu, x_a**2, sol))
    return out


def dicke_closed_form(p: CanonicalParams) -> list[TdSpectrum]:
    """Physical branches at theta = pi/2 from the explicit formulas."""
    if not is_dicke(p):
        raise DomainError(f"dicke_closed_form needs theta = pi/2, got {p.theta}")
    if p.lam**2 * 4.0 <= p.omega * p.Omega:
        return [normal_phase(p)]
    return superradiant_phase(p)


def theta0_closed_form(p: CanonicalParams) -> TdSpectrum:
    """Physical branch at theta = 0, where the coupling commutes with the field term."""
    if not is_aligned(p):
        raise DomainError(f"theta0_closed_form needs theta = 0, got {p.theta}")
    w, w0, lam = p.omega, p.Omega, p.lam
    x_a = SQRT2 * lam / w
    sol = DisplacementSolution(1.0, x_a, 1.0, "unique", "physical")
    eps = sorted((w, w0 + 4.0 * lam**2 / w))
    return TdSpectrum(eps[0], eps[1], -(w0 + 2.0 * lam**2 / w), 0.0, 2.0 * lam**2 / w**2, sol)
