import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.linalg import expm

from bfcalc.calculus import eigen_oracle, levy_apply
from bfcalc.errors import DomainError, SpecError
from bfcalc.subordination import (ComposedFamily, GammaFamily, IdentityTime, PoissonFamily,
                                  StableHalfFamily, compose_subordinator, density,
                                  derivative_norm, family_from_spec, laplace_consistency,
                                  semigroup_property_check, subordinate_matrix, t1_diagnostic)
from conftest import normal_from_seed

seeds = st.integers(0, 2 ** 32 - 1)
D12 = np.diag([1.0, 2.0]).astype(complex)
FAMILIES = {"gamma": GammaFamily(), "stable_half": StableHalfFamily(), "poisson": PoissonFamily(1.0)}


def rel(X, Y):
    return np.linalg.norm(X - Y, 2) / max(np.linalg.norm(Y, 2), 1e-300)


# -- densities -------------------------------------------------------------------------------


def test_gamma_density():
    assert density(GammaFamily(), 1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert density(GammaFamily(), 1.0, 2.0) == pytest.approx(0.135335, abs=1e-6)


def test_stable_half_density_laplace():
    f = lambda r: math.exp(-r) * density(StableHalfFamily(), 1.0, r)
    val = quad(f, 0, 1, epsrel=1e-12)[0] + quad(f, 1, np.inf, epsrel=1e-12)[0]
    assert val == pytest.approx(math.exp(-1.0), abs=1e-10)
    assert val == pytest.approx(0.367879, abs=1e-6)


def test_poisson_atoms():
    atoms = dict(density(PoissonFamily(1.0), 1.0, None))
    assert atoms[0] == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert atoms[3] == pytest.approx(math.exp(-1.0) / 6, rel=1e-14)


def test_density_time_checked():
    with pytest.raises(DomainError):
        density(GammaFamily(), 0.0, 1.0)
    with pytest.raises(DomainError):
        density(GammaFamily(), -1.0, 1.0)


def test_gamma_time_derivative_matches_difference():
    fam, t, s, h = GammaFamily(), 0.7, 1.3, 1e-6
    fd = (fam.density(t + h, s) - fam.density(t - h, s)) / (2 * h)
    assert fam.density_dt(t, s) == pytest.approx(fd, rel=1e-7)


def test_family_specs():
    for d in ({"family": "gamma"}, {"family": "stable_half"}, {"family": "poisson", "c": 2.0},
              {"family": "composed", "outer": {"family": "gamma"}, "inner": {"family": "stable_half"}}):
        fam = family_from_spec(d)
        assert family_from_spec(fam.spec()).spec() == fam.spec()
    with pytest.raises(SpecError):
        family_from_spec({"family": "cauchy"})


# -- subordinated matrices -------------------------------------------------------------------


def test_subordinate_matrix_examples():
    assert rel(subordinate_matrix(GammaFamily(), D12, 2.0), np.diag([0.25, 1 / 9])) <= 1e-9
    D14 = np.diag([1.0, 4.0])
    expect = np.diag([math.exp(-1.0), math.exp(-2.0)])
    assert rel(subordinate_matrix(StableHalfFamily(), D14, 1.0), expect) <= 1e-9
    assert np.array_equal(subordinate_matrix(PoissonFamily(1.0), D12, 0.0), np.eye(2))


def test_gamma_small_time_singularity():
    # t < 1: the density blows up at s = 0 and needs the weighted rule
    assert rel(subordinate_matrix(GammaFamily(), D12, 0.3),
               np.diag([2.0 ** -0.3, 3.0 ** -0.3])) <= 1e-9


def test_subordinate_matrix_non_normal():
    # (1 + A)^-1 for an upper-triangular block in closed form
    J = np.array([[1.0, 1.0], [0.0, 2.0]])
    expect = np.linalg.inv(np.eye(2) + J)
    assert rel(subordinate_matrix(GammaFamily(), J, 1.0), expect) <= 1e-9


def test_subordinate_matrix_rejects_growth():
    with pytest.raises(DomainError):
        subordinate_matrix(GammaFamily(), np.diag(np.exp([2j, -2j])), 1.0)
    with pytest.raises(DomainError):
        subordinate_matrix(ComposedFamily(GammaFamily(), StableHalfFamily()), D12, 1.0)


@given(seeds, st.sampled_from(sorted(FAMILIES)), st.floats(0.1, 3.0))
def test_subordination_matches_generator(seed, name, t):
    fam = FAMILIES[name]
    A = normal_from_seed(seed, 3, math.pi / 4)
    lhs = subordinate_matrix(fam, A, t)
    rhs = expm(-t * levy_apply(fam.psi(), A))
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-6


def test_gamma_matches_fractional_power_oracle():
    A = normal_from_seed(7, 4, math.pi / 3)
    assert rel(subordinate_matrix(GammaFamily(), A, 0.5),
               eigen_oracle(lambda l: (1 + l) ** -0.5, A)) <= 1e-8


# -- convolution semigroup --------------------------------------------------------------------


def test_semigroup_examples():
    rep = semigroup_property_check(GammaFamily(), 1.0, 1.0, [1.0])
    assert rep.passed and abs(rep.worst_margin) <= 1e-12
    assert semigroup_property_check(StableHalfFamily(), 1.0, 2.0, [1.0]).worst_margin >= -1e-8
    rep = semigroup_property_check(PoissonFamily(1.0), 0.5, 0.5, [1j])
    assert rep.passed and rep.tol == 1e-12


@given(st.sampled_from(sorted(FAMILIES)), st.floats(0.05, 3.0), st.floats(0.05, 3.0),
       st.floats(0.0, 5.0), st.floats(-5.0, 5.0))
def test_semigroup_property(name, t, s, x, y):
    assert semigroup_property_check(FAMILIES[name], t, s, [complex(x, y)]).passed


@given(st.sampled_from(sorted(FAMILIES)), st.floats(0.05, 5.0))
def test_mass_at_most_one(name, t):
    m = FAMILIES[name].mass(t)
    assert m <= 1 + 1e-9
    assert m == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_laplace_consistency(name):
    zs = [0.0, 0.5, 1.0 + 1j, 3j, 10.0]
    assert laplace_consistency(FAMILIES[name], [0.1, 0.5, 1.0, 2.5], zs) <= 1e-7


# -- T1 diagnostic -----------------------------------------------------------------------------


def test_t1_gamma_and_stable_bounded():
    for fam in (GammaFamily(), StableHalfFamily()):
        table = t1_diagnostic(fam, k=8)
        assert table.bounded
        assert max(v for _, v in table.rows) <= 5.0


@pytest.mark.parametrize("t", [0.5, 2.0 ** -10])
def test_gamma_derivative_norm_oracle(t):
    # int mu_t(s) |log s - digamma(t)| ds in v = log s, at 30 digits
    mp.mp.dps = 30
    dg = mp.digamma(t)
    f = lambda v: mp.exp(t * v - mp.exp(v)) / mp.gamma(t) * abs(v - dg)
    ref = float(mp.quad(f, [-mp.inf, dg - 5, dg, dg + 5, 0, 5]))
    assert derivative_norm(GammaFamily(), t) == pytest.approx(ref, rel=1e-9)


def test_t1_gamma_limit():
    # u = -t log s tends to Exp(1) and t (log s - digamma(t)) to 1 - u,
    # so t ||mu_t'|| -> E|1 - u| = 2/e
    t = 2.0 ** -12
    assert t * derivative_norm(GammaFamily(), t) == pytest.approx(2 / math.e, rel=1e-3)


def test_t1_poisson():
    table = t1_diagnostic(PoissonFamily(1.0), k=8)
    t, v = table.rows[-1]
    assert v == pytest.approx(2 * t, rel=1e-2)
    assert table.bounded and "not improving" in table.note


# -- composition -------------------------------------------------------------------------------


def test_compose_gamma_stable():
    rows, atom0, lrows = compose_subordinator(GammaFamily(), StableHalfFamily(), 1.0, [0.5, 1.0])
    (z, q, e), = lrows
    assert e == pytest.approx(0.5, abs=1e-15)
    assert abs(q - 0.5) <= 1e-6
    assert all(v >= 0 for _, v in rows) and atom0 == 0.0


def test_compose_identity_time():
    taus = [0.5, 1.0, 2.0]
    rows, _, _ = compose_subordinator(GammaFamily(), IdentityTime(), 1.5, taus)
    assert [v for _, v in rows] == pytest.approx(list(GammaFamily().density(1.5, np.array(taus))))


def test_compose_poisson_gamma():
    _, atom0, lrows = compose_subordinator(PoissonFamily(1.0), GammaFamily(), 1.0, [1.0])
    (z, q, e), = lrows
    assert e == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert abs(q - math.exp(-0.5)) <= 1e-6
    assert atom0 == pytest.approx(math.exp(-1.0))


# -- holomorphy probe --------------------------------------------------------------------------


@given(seeds, st.sampled_from(["gamma", "stable_half"]), st.floats(0.1, 1.4),
       st.floats(-1.0, 1.0), st.floats(0.01, 100.0))
def test_holomorphy_probe(seed, name, theta, frac, rad):
    # spectrum in Sigma_{pi/2 - theta}, complex time in Sigma_{theta - 0.05}
    A = normal_from_seed(seed, 3, math.pi / 2 - theta)
    P = levy_apply(FAMILIES[name].psi(), A)
    ang = frac * max(theta - 0.05, 0.0)
    tau_ = rad * complex(math.cos(ang), math.sin(ang))
    assert np.linalg.norm(expm(-tau_ * P), 2) <= 1 + 1e-8
