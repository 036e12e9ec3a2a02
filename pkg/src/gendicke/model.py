"""Generalised single-mode Dicke Hamiltonians and their canonical form.

The family considered is

    H = omega a^dag a + Omega_vec . J + (2 / sqrt(2j)) (a^dag + a) lambda_vec . J

with real three-vectors ``Omega_vec`` and ``lambda_vec``.  A rotation of the
spin axes maps any member onto

    H_theta = omega a^dag a + Omega (J_x cos(theta) + J_z sin(theta))
              + (2 lambda / sqrt(2j)) (a^dag + a) J_x

so four numbers (omega, Omega, theta, lambda) fully characterise the model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError, DomainError

HALF_PI = 0.5 * math.pi

#: Angle assigned when one of the two vectors vanishes and theta is undefined.
UNDEFINED_ANGLE = HALF_PI


def _as_vec3(v, name: str) -> np.ndarray:
    raw = np.asarray(v)
    if np.iscomplexobj(raw):
        raise DomainError(f"{name} must be real, got {v!r}")
    arr = raw.astype(float)
    if arr.shape != (3,):
        raise DomainError(f"{name} must be a real 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be real and finite, got {v!r}")
    return arr


@dataclass(frozen=True)
class GeneralCoupling:
    """Real-coupling Hamiltonian before the axis rotation.

    ``lambda_vec`` holds the unscaled components; the 2/sqrt(2j) prefactor is
    applied by the finite-j builder.
    """

    omega: float
    Omega_vec: tuple[float, float, float]
    lambda_vec: tuple[float, float, float]

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise DomainError(f"omega must be positive, got {self.omega}")
        object.__setattr__(self, "Omega_vec", tuple(_as_vec3(self.Omega_vec, "Omega_vec")))
        object.__setattr__(self, "lambda_vec", tuple(_as_vec3(self.lambda_vec, "lambda_vec")))


@dataclass(frozen=True)
class CanonicalParams:
    """The four-parameter model ``H_theta``.

    Attributes:
        omega: Boson frequency, > 0.
        Omega: Spin level splitting, >= 0.
        theta: Angle between static field and coupling axis, in [0, pi].
        lam: Coupling strength, >= 0.
    """

    omega: float
    Omega: float
    theta: float
    lam: float

    def __post_init__(self):
        for name in ("omega", "Omega", "theta", "lam"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
        if self.omega <= 0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if self.Omega < 0:
            raise DomainError(f"Omega must be non-negative, got {self.Omega}")
        if self.lam < 0:
            raise DomainError(f"lambda must be non-negative, got {self.lam}")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def critical_coupling(self) -> float:
        return 0.5 * math.sqrt(self.omega * self.Omega)

    def to_general(self) -> GeneralCoupling:
        """Embed back into the general form (field in the x-z plane, coupling along x)."""
        return GeneralCoupling(
            omega=self.omega,
            Omega_vec=(self.Omega * math.cos(self.theta), 0.0, self.Omega * math.sin(self.theta)),
            lambda_vec=(self.lam, 0.0, 0.0),
        )


def canonicalize(g: GeneralCoupling) -> CanonicalParams:
    """Reduce a general real coupling to ``(omega, Omega, theta, lambda)``.

    Rotating the spin frame so that ``lambda_vec`` lies along x and
    ``Omega_vec`` in the x-z plane with non-negative z component leaves the
    spectrum unchanged; only the magnitudes and the enclosed angle survive.

    When either vector vanishes the angle is meaningless and is set to
    :data:`UNDEFINED_ANGLE` (pi/2).

    Raises:
        DegenerateModelError: if both vectors are zero.
    """
    om = np.asarray(g.Omega_vec, dtype=float)
    la = np.asarray(g.lambda_vec, dtype=float)
    Omega = float(np.linalg.norm(om))
    lam = float(np.linalg.norm(la))
    if Omega == 0.0 and lam == 0.0:
        raise DegenerateModelError("Omega_vec and lambda_vec are both zero")
    if Omega == 0.0 or lam == 0.0:
        theta = UNDEFINED_ANGLE
    else:
        # atan2 keeps full precision near theta = 0 and pi where arccos does not
        u, v = om / Omega, la / lam
        theta = math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))
    return CanonicalParams(omega=float(g.omega), Omega=Omega, theta=theta, lam=lam)
