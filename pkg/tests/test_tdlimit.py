import math

import numpy as np
import pytest
from oracles import brute_force_minimum, classical_frequencies, quartic_stationary_points

from gendicke import tdlimit as td
from gendicke.errors import DomainError
from gendicke.model import CanonicalParams
from gendicke.quadratic_boson import ExcitationPair, Unstable, excitation_energies

HALF_PI = math.pi / 2


def P(theta, lam, omega=1.0, Omega=1.0):
    return CanonicalParams(omega, Omega, theta, lam)


# --- residual ---------------------------------------------------------------


@pytest.mark.parametrize("omega, Omega, lam", [(1, 1, 0.3), (2, 0.5, 1.1), (0.3, 4, 0.0)])
def test_residual_dicke_zero(omega, Omega, lam):
    assert td.displacement_residual(P(HALF_PI, lam, omega, Omega), 0.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("omega, Omega, lam", [(1, 1, 0.3), (2, 0.5, 1.1), (0.3, 4, 0.0)])
def test_residual_theta0_root_at_one(omega, Omega, lam):
    assert td.displacement_residual(P(0.0, lam, omega, Omega), 1.0) == 0.0


def test_residual_zero_coupling_root():
    theta = math.pi / 4
    x = math.sqrt(1 - math.sin(theta))
    assert x == pytest.approx(0.54120, abs=1e-5)
    assert abs(td.displacement_residual(P(theta, 0.0), x)) < 1e-14


def test_residual_domain():
    with pytest.raises(DomainError):
        td.displacement_residual(P(0.3, 0.2), math.sqrt(2))


def test_residual_is_minus_half_energy_gradient():
    p = P(1.0, 0.7, 1.3, 0.8)
    h = 1e-6
    for x in np.linspace(-1.3, 1.3, 27):
        grad = (td.ground_state_energy(p, x + h) - td.ground_state_energy(p, x - h)) / (2 * h)
        assert td.displacement_residual(p, x) == pytest.approx(-0.5 * grad, abs=1e-7)


# --- displacements ----------------------------------------------------------


def test_dicke_normal_only_below_critical():
    sols = td.solve_displacements(P(HALF_PI, 0.25))
    assert [(s.x_b, s.validity) for s in sols] == [(0.0, "physical")]


def test_dicke_displaced_above_critical():
    lam = 0.7
    mu = 1 / (4 * lam**2)
    assert mu == pytest.approx(0.51020, abs=1e-5)
    sols = {s.branch_tag: s for s in td.solve_displacements(P(HALF_PI, lam))}
    assert sols["normal"].validity == "unstable"
    plus, minus = sols["displaced_plus"], sols["displaced_minus"]
    assert plus.validity == minus.validity == "physical"
    assert plus.x_b == pytest.approx(math.sqrt(1 - mu), rel=1e-14)
    assert plus.x_b == pytest.approx(0.69986, abs=1e-5)
    assert plus.x_a == pytest.approx(0.85140, abs=1e-5)
    assert minus.x_b == -plus.x_b and minus.x_a == -plus.x_a
    for s in (plus, minus):
        assert abs(td.displacement_residual(P(HALF_PI, lam), s.x_b)) < 1e-12


def test_theta0_spurious_branch():
    sols = td.solve_displacements(P(0.0, 0.5))
    phys = [s for s in sols if s.validity == "physical"]
    assert len(phys) == 1 and phys[0].x_b == pytest.approx(1.0, abs=1e-12)
    near_minus_one = [s for s in sols if abs(s.x_b + 1) < 1e-6]
    assert near_minus_one and all(s.validity == "spurious" for s in near_minus_one)


@pytest.mark.parametrize(
    "theta, lam, omega, Omega",
    [(0.3, 0.2, 1, 1), (math.pi / 4, 0.8, 1, 1), (1.2, 1.4, 0.7, 1.9), (2.0, 0.6, 1, 1), (2.9, 0.35, 2, 0.5)],
)
def test_roots_match_quartic_oracle(theta, lam, omega, Omega):
    p = P(theta, lam, omega, Omega)
    # roots hugging b = 2 cannot meet the residual tolerance and are dropped
    expected = [x for x in quartic_stationary_points(p) if x * x < 1.99]
    got = [s.x_b for s in td.solve_displacements(p) if s.b < 1.99]
    np.testing.assert_allclose(sorted(got), sorted(expected), atol=1e-8)
    e_min, _ = brute_force_minimum(p)
    for x in quartic_stationary_points(p):
        if x * x >= 1.99:
            assert td.ground_state_energy(p, x) > e_min + 0.1


def test_x_a_relation_and_residual_invariants():
    for theta in np.linspace(0, math.pi, 13):
        for lam in (0.0, 0.3, 0.5, 0.9):
            p = P(float(theta), lam, 1.2, 0.9)
            for s in td.solve_displacements(p):
                assert 0 <= s.b < 2
                assert s.x_a == pytest.approx((2 * lam / 1.2) * s.x_b * math.sqrt((2 - s.b) / 2), abs=1e-15)
                assert s.x_a * s.x_b >= 0
                assert abs(td.displacement_residual(p, s.x_b)) < 1e-12


def test_both_zero_rejected():
    with pytest.raises(DomainError):
        td.solve(CanonicalParams(1, 0, 0.3, 0))


# --- quadratic form ---------------------------------------------------------


@pytest.mark.parametrize("theta", [0.0, 0.4, math.pi / 4, 1.3, 2.2, 3.0])
def test_quadratic_form_zero_coupling_identity(theta):
    p = P(theta, 0.0, Omega=1.7)
    sin_t = math.sin(theta)
    x = math.copysign(math.sqrt(1 - sin_t), math.cos(theta))
    q = td.quadratic_form(p, td.DisplacementSolution(x, 0.0, x * x))
    assert q.omega_b_tilde == pytest.approx(1.7 * (1 + sin_t) / 2, rel=1e-13)
    assert q.s == pytest.approx(1.7 * (1 - sin_t) * (3 + sin_t) / (8 * (1 + sin_t)), rel=1e-12, abs=1e-15)
    assert q.r == pytest.approx(0.0, abs=1e-15)
    assert math.sqrt(q.omega_b_tilde * (q.omega_b_tilde + 4 * q.s)) == pytest.approx(1.7, rel=1e-13)


@pytest.mark.parametrize("lam", [0.1, 0.25, 0.45])
def test_quadratic_form_dicke_normal(lam):
    q = td.quadratic_form(P(HALF_PI, lam), td.DisplacementSolution(0.0, 0.0, 0.0))
    assert (q.omega_b_tilde, q.s) == (pytest.approx(1.0), pytest.approx(0.0, abs=1e-16))
    assert q.r == pytest.approx(lam, rel=1e-15)
    assert q.e_g == pytest.approx(-1.0)


@pytest.mark.parametrize("lam, omega, Omega", [(0.3, 1, 1), (0.7, 1.5, 0.6)])
def test_quadratic_form_theta0(lam, omega, Omega):
    p = P(0.0, lam, omega, Omega)
    x_a = math.sqrt(2) * lam / omega
    q = td.quadratic_form(p, td.DisplacementSolution(1.0, x_a, 1.0))
    assert q.r == 0.0
    assert math.sqrt(q.omega_b_tilde * (q.omega_b_tilde + 4 * q.s)) == pytest.approx(Omega + 4 * lam**2 / omega)
    assert q.s == pytest.approx(0.75 * q.omega_b_tilde)


@pytest.mark.parametrize(
    "theta, lam, omega, Omega",
    [(math.pi / 4, 0.8, 1, 1), (0.3, 0.4, 1, 1.3), (2.5, 0.7, 1, 1.3), (1.0, 0.2, 2.0, 0.5), (1.5, 0.9, 1, 1)],
)
def test_spectrum_matches_classical_hessian(theta, lam, omega, Omega):
    p = P(theta, lam, omega, Omega)
    sp = td.ground_branch(p)
    e_min, eps_m, eps_p = classical_frequencies(p, sp.solution.x_b)
    assert sp.e_g == pytest.approx(e_min, abs=1e-9)
    assert sp.eps_minus == pytest.approx(eps_m, rel=1e-5)
    assert sp.eps_plus == pytest.approx(eps_p, rel=1e-5)


# --- full solve -------------------------------------------------------------


def test_solve_dicke_superradiant_values():
    lam = 0.7
    mu = 1 / (4 * lam**2)
    branches = td.solve(P(HALF_PI, lam))
    assert len(branches) == 2
    e_g = -(2 * lam**2 + 1 / (8 * lam**2))
    root = math.sqrt((1 / mu**2 - 1) ** 2 + 4)
    for sp in branches:
        assert sp.eps_minus == pytest.approx(math.sqrt(0.5 * (1 / mu**2 + 1 - root)), rel=1e-12)
        assert sp.eps_plus == pytest.approx(math.sqrt(0.5 * (1 / mu**2 + 1 + root)), rel=1e-12)
        assert sp.e_g == pytest.approx(e_g, rel=1e-13)
        assert sp.jz_per_j == pytest.approx(-mu, rel=1e-13)
        assert sp.photons_per_j == pytest.approx(2 * lam**2 * (1 - mu**2), rel=1e-13)
    assert branches[0].eps_minus == pytest.approx(0.82666, abs=1e-5)
    assert branches[0].e_g == pytest.approx(-1.23510, abs=1e-5)


def test_solve_theta0_values():
    (sp,) = td.solve(P(0.0, 0.5))
    assert (sp.eps_minus, sp.eps_plus, sp.e_g, sp.jz_per_j) == (
        pytest.approx(1.0), pytest.approx(2.0), pytest.approx(-1.5), pytest.approx(0.0, abs=1e-15))
    assert sp.photons_per_j == pytest.approx(0.5)


@pytest.mark.parametrize("theta", [0.0, 0.7, HALF_PI, 2.0, math.pi])
def test_solve_zero_coupling(theta):
    (sp,) = td.solve(P(theta, 0.0, omega=1.3, Omega=0.8))
    assert sorted([sp.eps_minus, sp.eps_plus]) == [pytest.approx(0.8), pytest.approx(1.3)]
    assert sp.e_g == pytest.approx(-0.8, abs=1e-12)
    assert sp.jz_per_j == pytest.approx(-math.sin(theta), abs=1e-12)
    assert sp.photons_per_j == 0.0


@pytest.mark.parametrize("theta", [0.2, 0.9, 1.4, 1.7, 2.4, 3.1])
@pytest.mark.parametrize("lam", [0.1, 0.5, 0.8, 1.4])
def test_physical_branch_is_global_minimum(theta, lam):
    p = P(theta, lam, 1.1, 0.9)
    (sp,) = td.solve(p)
    e_min, x_b = brute_force_minimum(p)
    assert sp.e_g == pytest.approx(e_min, abs=1e-11)
    assert sp.solution.x_b == pytest.approx(x_b, abs=1e-6)
    assert np.sign(sp.solution.x_b) == np.sign(math.cos(theta)) == np.sign(sp.solution.x_a)


def test_theta_pi_matches_mirror_of_theta0():
    a, b = td.solve(P(0.0, 0.6))[0], td.solve(P(math.pi, 0.6))[0]
    assert b.solution.x_b == pytest.approx(-a.solution.x_b)
    for f in ("eps_minus", "eps_plus", "e_g", "jz_per_j", "photons_per_j"):
        assert getattr(b, f) == pytest.approx(getattr(a, f), abs=1e-12)


def test_classification_dicke_above_critical():
    staged = td.solve(P(HALF_PI, 0.7), include_rejected=True)
    by_tag = {sol.branch_tag: (sol, ex) for sol, _, ex in staged}
    assert isinstance(by_tag["normal"][1], Unstable)
    assert by_tag["normal"][0].validity == "unstable"


def test_classification_theta0_spurious_energy():
    lam = 0.3
    staged = td.solve(P(0.0, lam), include_rejected=True)
    spurious = [(sol, q) for sol, q, ex in staged if sol.validity == "spurious"]
    assert len(spurious) == 1
    sol, q = spurious[0]
    assert sol.x_b == pytest.approx(-1.0)
    assert q.e_g == pytest.approx(1 - 2 * lam**2)  # mirror-image sector energy
    assert isinstance(excitation_energies(q), ExcitationPair)


# --- closed forms -----------------------------------------------------------


@pytest.mark.parametrize("omega, Omega, expected", [(1, 1, 0.5), (2, 2, 1.0), (0.5, 2, 0.5)])
def test_critical_coupling(omega, Omega, expected):
    assert td.critical_coupling(omega, Omega) == pytest.approx(expected)


@pytest.mark.parametrize("args", [(0, 1), (1, 0), (-1, 1)])
def test_critical_coupling_domain(args):
    with pytest.raises(DomainError):
        td.critical_coupling(*args)


def test_dicke_closed_form_normal_example():
    (sp,) = td.dicke_closed_form(P(HALF_PI, 0.25))
    assert sp.eps_minus**2 == pytest.approx(0.5)
    assert sp.eps_plus**2 == pytest.approx(1.5)
    assert sp.e_g == -1.0


def test_dicke_closed_form_continuity_at_critical():
    p = P(HALF_PI, 0.5)
    normal = td.normal_phase(p)
    displaced = td.superradiant_phase(p)
    assert normal.eps_minus == 0.0
    assert displaced[0].eps_minus == pytest.approx(0.0, abs=1e-7)
    assert normal.e_g == displaced[0].e_g == -1.0


def test_closed_form_domains():
    with pytest.raises(DomainError):
        td.dicke_closed_form(P(1.0, 0.3))
    with pytest.raises(DomainError):
        td.theta0_closed_form(P(0.1, 0.3))


def test_theta0_closed_form_values():
    sp = td.theta0_closed_form(P(0.0, 0.5))
    assert (sp.eps_minus, sp.eps_plus, sp.e_g, sp.jz_per_j, sp.photons_per_j) == pytest.approx(
        (1.0, 2.0, -1.5, 0.0, 0.5))


def test_gap_positive_off_critical_line():
    for theta in np.linspace(0, math.pi, 25):
        for lam in np.linspace(0, 1.5, 61):
            if abs(theta - HALF_PI) < 1e-3 and abs(lam - 0.5) < 1e-3:
                continue
            for sp in td.solve(P(float(theta), float(lam))):
                assert sp.eps_minus > 1e-6, (theta, lam)
    assert td.solve(P(HALF_PI, 0.5))[0].eps_minus < 1e-5
