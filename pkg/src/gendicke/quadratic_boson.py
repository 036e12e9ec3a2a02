"""Two-mode quadratic boson Hamiltonians.

The effective thermodynamic-limit Hamiltonian has the form

    H = omega a^dag a + omega_t b^dag b + s (b^dag + b)^2
        + r (a^dag + a)(b^dag + b) + j E_G + const

Its normal-mode energies follow in closed form; :func:`diagonalize_numeric`
obtains the same numbers from the classical dynamical matrix and serves as a
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class QuadraticForm:
    """Coefficients of the effective two-mode Hamiltonian.

    ``e_g`` is the ground-state energy per unit spin length; the order-unity
    additive constant is not tracked.
    """

    omega_a: float
    omega_b_tilde: float
    s: float
    r: float
    e_g: float = 0.0

    def __post_init__(self):
        vals = (self.omega_a, self.omega_b_tilde, self.s, self.r, self.e_g)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"quadratic form coefficients must be finite, got {vals}")
        if self.omega_a <= 0:
            raise DomainError(f"omega_a must be positive, got {self.omega_a}")

    @property
    def tol_neg(self) -> float:
        """Roundoff allowance below zero for a squared mode energy."""
        return 1e-12 * max(self.omega_a**2, self.omega_b_tilde**2)


@dataclass(frozen=True)
class ExcitationPair:
    eps_minus: float
    eps_plus: float


@dataclass(frozen=True)
class Unstable:
    """Marker for a quadratic form with an imaginary normal-mode energy.

    The squared energies are kept (``eps_minus_sq`` may be complex when the
    discriminant is negative) so callers can report how unstable the point is.
    """

    eps_minus_sq: complex
    eps_plus_sq: complex

    def __bool__(self) -> bool:
        return False


def squared_energies(q: QuadraticForm) -> tuple[complex | float, complex | float]:
    """Return ``(eps_minus**2, eps_plus**2)`` from the closed-form expression."""
    w, wt, s, r = q.omega_a, q.omega_b_tilde, q.s, q.r
    bmode_sq = wt * wt + 4.0 * wt * s
    total = w * w + bmode_sq
    disc = (bmode_sq - w * w) ** 2 + 16.0 * r * r * w * wt
    if disc < 0:
        root = complex(0.0, math.sqrt(-disc))
        return 0.5 * (total - root), 0.5 * (total + root)
    root = math.sqrt(disc)
    # product of the roots; avoids cancellation in (total - root) near criticality
    det = w * w * bmode_sq - 4.0 * r * r * w * wt
    if total >= 0:
        plus = 0.5 * (total + root)
        minus = det / plus if plus != 0 else 0.0
    else:
        minus = 0.5 * (total - root)
        plus = det / minus
    return minus, plus


def _classify(minus_sq, plus_sq, tol: float) -> ExcitationPair | Unstable:
    if isinstance(minus_sq, complex) and abs(minus_sq.imag) > tol:
        return Unstable(minus_sq, plus_sq)
    minus_sq, plus_sq = float(np.real(minus_sq)), float(np.real(plus_sq))
    if minus_sq < -tol or plus_sq < -tol:
        return Unstable(minus_sq, plus_sq)
    return ExcitationPair(math.sqrt(max(minus_sq, 0.0)), math.sqrt(max(plus_sq, 0.0)))


def excitation_energies(q: QuadraticForm) -> ExcitationPair | Unstable:
    """Closed-form excitation energies of ``q``.

    Returns :class:`Unstable` when either squared energy is negative beyond
    ``q.tol_neg`` or complex; at a critical point the soft mode is reported
    as exactly zero rather than unstable.
    """
    minus_sq, plus_sq = squared_energies(q)
    return _classify(minus_sq, plus_sq, q.tol_neg)


def dynamical_matrix(q: QuadraticForm) -> np.ndarray:
    """4x4 matrix ``A`` with ``d/dt (X, x, P, p) = A (X, x, P, p)``.

    In quadratures ``a = (X + iP)/sqrt(2)`` the form reads
    ``H = 1/2 P^T M P + 1/2 X^T K X`` with ``M = diag(omega, omega_t)`` and
    ``K = [[omega, 2r], [2r, omega_t + 4s]]``.
    """
    M = np.diag([q.omega_a, q.omega_b_tilde])
    K = np.array([[q.omega_a, 2.0 * q.r], [2.0 * q.r, q.omega_b_tilde + 4.0 * q.s]])
    Z = np.zeros((2, 2))
    return np.block([[Z, M], [-K, Z]])


def diagonalize_numeric(q: QuadraticForm) -> ExcitationPair | Unstable:
    """Normal-mode energies from the eigenvalues of :func:`dynamical_matrix`.

    Eigenvalues come in pairs ``+-i eps``; ``eps**2 = -mu**2`` is real and
    positive for a stable mode.
    """
    mu = np.linalg.eigvals(dynamical_matrix(q))
    # each squared frequency appears twice
    sq = sorted(-(mu.astype(complex) ** 2), key=lambda z: (z.real, z.imag))
    minus_sq, plus_sq = sq[0], sq[-1]
    tol = q.tol_neg
    if abs(minus_sq.imag) > tol or abs(plus_sq.imag) > tol:
        return Unstable(minus_sq, plus_sq)
    if minus_sq.real < -tol:
        return Unstable(minus_sq.real, plus_sq.real)
    # recover eps from the eigenvalue itself: sqrt of a tiny eps**2 loses digits
    freqs = np.sort(np.abs(mu))
    eps_minus = 0.5 * (freqs[0] + freqs[1])
    eps_plus = 0.5 * (freqs[2] + freqs[3])
    return ExcitationPair(float(eps_minus), float(eps_plus))
