"""Exact diagonalization of ``H_theta`` at finite spin length.

Basis states are ``|n> (x) |j, m>`` with ``n = 0..n_max`` photons and
``m = -j..j``; the combined index is ``n * (2j + 1) + (m + j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import DomainError, SolverError
from .model import CanonicalParams, GeneralCoupling
from .tdlimit import ground_branch, is_aligned

#: Dense matrices with more entries than this are refused unless asked for.
MAX_DENSE_ENTRIES = 10**6
#: Basis dimension cap for the sparse path.
MAX_SPARSE_DIM = 10**6
#: Above this dimension a lowest-k request goes to the Lanczos solver.
SPARSE_THRESHOLD = 1000
CONVERGENCE_TOL = 1e-8


@dataclass(frozen=True)
class BasisSpec:
    j: float
    n_max: int

    def __post_init__(self):
        two_j = 2 * Fraction(self.j).limit_denominator(2)
        if two_j.denominator != 1 or two_j <= 0 or abs(float(two_j) - 2 * self.j) > 1e-12:
            raise DomainError(f"j must be a positive half-integer, got {self.j}")
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise DomainError(f"n_max must be a non-negative integer, got {self.n_max}")
        object.__setattr__(self, "j", float(two_j) / 2)
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def spin_dim(self) -> int:
        return int(round(2 * self.j)) + 1

    @property
    def dim(self) -> int:
        return (self.n_max + 1) * self.spin_dim


@dataclass(frozen=True)
class FiniteJResult:
    energies: np.ndarray
    gs_energy_per_j: float
    gs_jz_per_j: float
    gs_photons_per_j: float
    gs_parity: float
    parity_commutator_norm: float
    converged: bool | None = None
    n_max: int | None = None


# --- single-space operators ---------------------------------------------------


def spin_ops(j: float) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    """(J_z, J_+, J_-) on ``m = -j..j`` (ascending)."""
    m = np.arange(-j, j + 0.5, 1.0)
    jp_elems = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jz = sp.diags(m).tocsr()
    jp = sp.diags(jp_elems, -1).tocsr()  # <m+1|J+|m> sits below the diagonal
    return jz, jp, jp.T.tocsr()


def boson_ops(n_max: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """(a, a^dag a) truncated to ``n <= n_max``."""
    a = sp.diags(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).tocsr()
    num = sp.diags(np.arange(n_max + 1, dtype=float)).tocsr()
    return a, num


def _check_size(basis: BasisSpec, sparse: bool, allow_large: bool):
    if allow_large:
        return
    if sparse and basis.dim > MAX_SPARSE_DIM:
        raise DomainError(f"basis dimension {basis.dim} exceeds {MAX_SPARSE_DIM}")
    if not sparse and basis.dim**2 > MAX_DENSE_ENTRIES:
        raise DomainError(
            f"dense matrix would have {basis.dim**2} entries (> {MAX_DENSE_ENTRIES}); "
            "use sparse=True or allow_large=True"
        )


def _assemble(omega, field_vec, coupling_vec, basis: BasisSpec):
    """``omega a^dag a + field . J + (2/sqrt(2j)) (a + a^dag) coupling . J`` as sparse."""
    j = basis.j
    jz, jp, jm = spin_ops(j)
    jx = 0.5 * (jp + jm)
    jy = -0.5j * (jp - jm)
    a, num = boson_ops(basis.n_max)
    eye_s = sp.identity(basis.spin_dim, format="csr")
    eye_b = sp.identity(basis.n_max + 1, format="csr")

    def spin_dot(v):
        out = v[0] * jx + v[2] * jz
        return out + v[1] * jy if v[1] != 0 else out

    x_field = a + a.T
    H = (
        omega * sp.kron(num, eye_s)
        + sp.kron(eye_b, spin_dot(field_vec))
        + (2.0 / math.sqrt(2.0 * j)) * sp.kron(x_field, spin_dot(coupling_vec))
    )
    H = H.tocsr()
    if not np.iscomplexobj(H.data) or not np.any(H.data.imag):
        H = H.real.tocsr()
    return H


def build_hamiltonian(
    p: CanonicalParams, basis: BasisSpec, sparse: bool = False, allow_large: bool = False
):
    """Matrix of ``H_theta`` in the truncated product basis (real symmetric)."""
    _check_size(basis, sparse, allow_large)
    field = (p.Omega * math.cos(p.theta), 0.0, p.Omega * math.sin(p.theta))
    H = _assemble(p.omega, field, (p.lam, 0.0, 0.0), basis)
    return H if sparse else H.toarray()


def build_general_hamiltonian(
    g: GeneralCoupling, basis: BasisSpec, sparse: bool = False, allow_large: bool = False
):
    """Matrix of the unrotated Hamiltonian; complex Hermitian when J_y enters."""
    _check_size(basis, sparse, allow_large)
    H = _assemble(g.omega, g.Omega_vec, g.lambda_vec, basis)
    return H if sparse else H.toarray()


def parity_diagonal(basis: BasisSpec) -> np.ndarray:
    """Diagonal of exp(i pi (a^dag a + J_z + j)): (-1)^(n + m + j)."""
    n = np.repeat(np.arange(basis.n_max + 1), basis.spin_dim)
    k = np.tile(np.arange(basis.spin_dim), basis.n_max + 1)  # k = m + j
    return np.where((n + k) % 2 == 0, 1.0, -1.0)


def observables_diagonals(basis: BasisSpec) -> tuple[np.ndarray, np.ndarray]:
    """Diagonals of J_z and a^dag a in the product basis."""
    n = np.repeat(np.arange(basis.n_max + 1, dtype=float), basis.spin_dim)
    m = np.tile(np.arange(basis.spin_dim, dtype=float) - basis.j, basis.n_max + 1)
    return m, n


def commutator_norm(H, pi_diag: np.ndarray) -> float:
    """Frobenius norm of [H, Pi] for diagonal Pi."""
    if sp.issparse(H):
        coo = H.tocoo()
        vals = coo.data * (pi_diag[coo.col] - pi_diag[coo.row])
        return float(np.linalg.norm(vals))
    return float(np.linalg.norm(H * (pi_diag[None, :] - pi_diag[:, None])))


def frobenius_norm(H) -> float:
    return float(sp.linalg.norm(H)) if sp.issparse(H) else float(np.linalg.norm(H))


def eigensystem(H, k: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Lowest ``k`` (or all) eigenpairs, ascending.

    Dense LAPACK for small problems or full spectra; Lanczos (ARPACK) for a
    few low-lying states of a large sparse matrix.
    """
    dim = H.shape[0]
    if k is not None and k >= dim:
        k = None
    if k is not None and dim > SPARSE_THRESHOLD:
        Hs = H if sp.issparse(H) else sp.csr_matrix(H)
        try:
            vals, vecs = eigsh(Hs, k=max(k, 2), which="SA", tol=1e-13, ncv=max(2 * k + 1, 40), maxiter=dim * 20)
        except ArpackNoConvergence as exc:
            raise SolverError(
                f"Lanczos did not converge for dim={dim}, k={k}: {len(exc.eigenvalues)} of {k} pairs"
            ) from exc
        order = np.argsort(vals)[:k]
        return vals[order], vecs[:, order]
    Hd = H.toarray() if sp.issparse(H) else np.asarray(H)
    try:
        if k is None:
            return scipy.linalg.eigh(Hd)
        return scipy.linalg.eigh(Hd, subset_by_index=[0, k - 1])
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"dense eigensolver failed for dim={dim}: {exc}") from exc


def diagonalize(H, basis: BasisSpec, k: int | None = None) -> FiniteJResult:
    """Spectrum plus ground-state observables of ``H`` on ``basis``."""
    vals, vecs = eigensystem(H, k)
    gs = vecs[:, 0]
    prob = np.abs(gs) ** 2
    m, n = observables_diagonals(basis)
    pi_diag = parity_diagonal(basis)
    return FiniteJResult(
        energies=np.asarray(vals),
        gs_energy_per_j=float(vals[0]) / basis.j,
        gs_jz_per_j=float(prob @ m) / basis.j,
        gs_photons_per_j=float(prob @ n) / basis.j,
        gs_parity=float(prob @ pi_diag),
        parity_commutator_norm=commutator_norm(H, pi_diag),
        n_max=basis.n_max,
    )


def auto_cutoff(p: CanonicalParams, j: float) -> int:
    """Fock cutoff ``max(40, ceil(8 alpha) + 20)`` from the thermodynamic-limit field displacement."""
    photons = ground_branch(p).photons_per_j
    return max(40, math.ceil(8.0 * j * photons) + 20)


def solve_finite_j(
    p: CanonicalParams,
    j: float,
    n_max: int | None = None,
    k: int | None = 1,
    check_convergence: bool = True,
) -> FiniteJResult:
    """Ground state (and ``k`` lowest levels) of ``H_theta`` at spin ``j``.

    ``n_max=None`` selects :func:`auto_cutoff`.  With ``check_convergence`` the
    problem is re-solved at ``2 n_max`` and ``converged`` records whether E0/j
    moved by less than 1e-8.
    """
    if n_max is None:
        n_max = auto_cutoff(p, j)
    basis = BasisSpec(j, n_max)
    use_sparse = k is not None and basis.dim > SPARSE_THRESHOLD
    H = build_hamiltonian(p, basis, sparse=use_sparse, allow_large=use_sparse)
    res = diagonalize(H, basis, k)
    if not check_convergence:
        return res
    wide = BasisSpec(j, 2 * n_max)
    H2 = build_hamiltonian(p, wide, sparse=True)
    e2 = eigensystem(H2, 1)[0][0] / j
    converged = bool(abs(e2 - res.gs_energy_per_j) < CONVERGENCE_TOL)
    return FiniteJResult(**{**res.__dict__, "converged": converged})


def parity_check(p: CanonicalParams, basis: BasisSpec) -> tuple[float, float]:
    """(||[H, Pi]||_F, <Pi> in the ground state)."""
    sparse = basis.dim > SPARSE_THRESHOLD
    H = build_hamiltonian(p, basis, sparse=sparse, allow_large=sparse)
    pi_diag = parity_diagonal(basis)
    _, vecs = eigensystem(H, 1)
    gs = vecs[:, 0]
    return commutator_norm(H, pi_diag), float(np.abs(gs) ** 2 @ pi_diag)


def theta0_spectrum(p: CanonicalParams, j: float, n_max: int) -> np.ndarray:
    """Exact levels ``omega n + Omega m - 2 lambda^2 m^2 / (j omega)`` at theta = 0.

    Each J_x sector is a displaced oscillator.  A truncated matrix reproduces
    these only for levels well below the cutoff.
    """
    if not is_aligned(p):
        raise DomainError(f"theta0_spectrum needs theta = 0, got {p.theta}")
    basis = BasisSpec(j, n_max)
    m = np.arange(-basis.j, basis.j + 0.5, 1.0)
    n = np.arange(n_max + 1, dtype=float)
    levels = p.omega * n[:, None] + p.Omega * m[None, :] - 2.0 * p.lam**2 * m[None, :] ** 2 / (basis.j * p.omega)
    return np.sort(levels.ravel())
