"""Thermodynamic-limit and exact-diagonalization solvers for generalised Dicke models."""

__version__ = "0.1.0"

from .errors import DegenerateModelError, DickeError, DomainError, SolverError
from .finite_j import BasisSpec, FiniteJResult, solve_finite_j
from .model import CanonicalParams, GeneralCoupling, canonicalize
from .quadratic_boson import ExcitationPair, QuadraticForm, Unstable, diagonalize_numeric, excitation_energies
from .tdlimit import (
    DisplacementSolution,
    TdSpectrum,
    critical_coupling,
    dicke_closed_form,
    solve,
    solve_displacements,
    theta0_closed_form,
)

__all__ = [
    "BasisSpec",
    "CanonicalParams",
    "DegenerateModelError",
    "DickeError",
    "DisplacementSolution",
    "DomainError",
    "ExcitationPair",
    "FiniteJResult",
    "GeneralCoupling",
    "QuadraticForm",
    "SolverError",
    "TdSpectrum",
    "Unstable",
    "canonicalize",
    "critical_coupling",
    "diagonalize_numeric",
    "dicke_closed_form",
    "excitation_energies",
    "solve",
    "solve_displacements",
    "solve_finite_j",
    "theta0_closed_form",
]
