import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bfcalc.bernstein import Affine, Log1p, OneMinusExp, Power, ratio_cbf, resolvent_diff_scalar
from bfcalc.calculus import (SectorContour, contour_apply, eigen_oracle, fractional_power,
                             hirsch_apply, kato_bound, kato_bound_holds, kato_fracpow_resolvent,
                             levy_apply, resolvent, resolvent_identity_parts,
                             resolvent_identity_residual, tau)
from bfcalc.errors import ContourError, DomainError, NearSpectrumError, NotSectorialError
from bfcalc.measures import RadonMeasure
from bfcalc.random_gen import upper_triangular_resolvent
from bfcalc.sectorial import make_sectorial, matrix_from_json, matrix_to_json
from conftest import normal_from_seed, triple_from_seed

seeds = st.integers(0, 2 ** 32 - 1)
D12 = np.diag([1.0, 2.0]).astype(complex)
D14 = np.diag([1.0, 4.0]).astype(complex)
JORDAN = np.array([[1.0, 1.0], [0.0, 2.0]], dtype=complex)


def rel(X, Y):
    return np.linalg.norm(X - Y, 2) / max(np.linalg.norm(Y, 2), 1e-300)


def random_unitary(seed, n=2):
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n))
                        + 1j * np.random.default_rng(seed + 1).standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


# -- sectorial matrices ------------------------------------------------------------


def test_make_sectorial_diagonal():
    S = make_sectorial(D12)
    assert S.omega == 0.0
    assert S.M == pytest.approx(1.0, abs=1e-12)
    assert {"grid", "refinement", "worst_s"} <= set(S.metadata)


def test_make_sectorial_non_normal():
    # s ||(s+A)^-1|| for the Jordan-type block, maximised on a fine grid
    A = np.array([[1.0, 10.0], [0.0, 1.0]])
    s = np.geomspace(1e-3, 1e3, 20001)
    grid = max(x * np.linalg.norm(np.linalg.inv(A + x * np.eye(2)), 2) for x in s[::20])
    S = make_sectorial(A)
    assert S.M == pytest.approx(2.60, abs=5e-3)
    assert S.M >= grid * (1 - 1e-4)


def test_make_sectorial_angle():
    A = np.diag(np.exp([1j * math.pi / 3, -1j * math.pi / 3]))
    assert make_sectorial(A).omega == pytest.approx(math.pi / 3, abs=1e-14)


def test_not_sectorial():
    with pytest.raises(NotSectorialError):
        make_sectorial(np.diag([1.0, -1.0]))
    with pytest.raises(NotSectorialError):
        make_sectorial(np.zeros((2, 2)))
    with pytest.raises(DomainError):
        make_sectorial(np.eye(65))


def test_sector_constant_grows_towards_spectrum():
    S = make_sectorial(np.diag(np.exp([1j * math.pi / 3, -1j * math.pi / 3])))
    assert 1.0 <= S.M_sector(1.5) <= S.M_sector(1.1)
    with pytest.raises(DomainError):
        S.M_sector(0.5)


def test_matrix_json_round_trip():
    A = np.array([[1 + 2j, 0.5], [0, 3 - 1j]])
    assert np.array_equal(matrix_from_json(matrix_to_json(A)), A)


# -- resolvent --------------------------------------------------------------------------


def test_resolvent_examples():
    assert np.allclose(resolvent(D12, 1.0), np.diag([0.5, 1 / 3]), rtol=1e-15)
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(resolvent(N, 1.0), [[1.0, -1.0], [0.0, 1.0]], rtol=1e-15)
    assert np.allclose(resolvent(D12, -1.5), np.diag([-2.0, 2.0]), rtol=1e-14)
    with pytest.raises(NearSpectrumError):
        resolvent(D12, -1.0)


@given(st.floats(0.1, 10.0), st.floats(-2.5, 2.5))
def test_resolvent_upper_triangular_closed_form(r, th):
    z = r * complex(math.cos(th), math.sin(th))
    assert rel(resolvent(JORDAN, z), upper_triangular_resolvent(JORDAN, z)) <= 1e-13


# -- eigen oracle -------------------------------------------------------------------------


def test_eigen_oracle_examples():
    assert np.allclose(eigen_oracle(lambda z: z ** 2, D12), np.diag([1.0, 4.0]))
    assert np.allclose(eigen_oracle(lambda z: 1 / (1 + z), np.diag([1.0, 3.0])), np.diag([0.5, 0.25]))
    U = random_unitary(3)
    A = U @ D12 @ U.conj().T
    expect = U @ np.diag([0.632121, 0.864665]) @ U.conj().T
    assert np.allclose(eigen_oracle(OneMinusExp(), A), expect, atol=1e-6)


def test_eigen_oracle_refuses_non_normal():
    with pytest.raises(DomainError):
        eigen_oracle(OneMinusExp(), JORDAN)


# -- Hirsch calculus ----------------------------------------------------------------------


def test_hirsch_examples():
    phi = (0.0, 0.0, RadonMeasure.dirac(1.0))
    assert np.allclose(hirsch_apply(phi, D12), np.diag([0.5, 2 / 3]), rtol=1e-10)
    assert rel(hirsch_apply(Power(0.5), D14), np.diag([1.0, 2.0])) <= 1e-8
    assert np.allclose(hirsch_apply(Affine(3.0, 0.0), D14), 3.0 * np.eye(2))


def test_hirsch_non_normal_closed_form():
    # A (1 + A)^-1 for the 2x2 block, via its closed-form resolvent
    expect = np.eye(2) - upper_triangular_resolvent(JORDAN, 1.0)
    assert rel(hirsch_apply(ratio_cbf(1.0), JORDAN), expect) <= 1e-10


def test_fractional_power():
    A = np.diag([4.0, 9.0])
    assert rel(fractional_power(A, 1.5), np.diag([8.0, 27.0])) <= 1e-9
    assert rel(fractional_power(A, 2.0), np.diag([16.0, 81.0])) <= 1e-15


# -- Lévy calculus --------------------------------------------------------------------------


def test_levy_examples():
    expect = np.diag([1 - math.exp(-1), 1 - math.exp(-2)])
    assert rel(levy_apply(OneMinusExp(), D12), expect) <= 1e-12
    assert np.array_equal(levy_apply(Affine(0.0, 1.0), JORDAN), JORDAN)
    sq = levy_apply(Power(0.5), D14)
    assert rel(sq, np.diag([1.0, 2.0])) <= 1e-7
    assert rel(sq, hirsch_apply(Power(0.5), D14)) <= 1e-7


def test_levy_rejects_growing_semigroup():
    A = np.diag(np.exp([2j, -2j]))
    with pytest.raises(DomainError):
        levy_apply(OneMinusExp(), A)


def test_levy_non_normal_closed_form():
    # 1 - exp(-A) for an upper-triangular 2x2 block with distinct eigenvalues
    e1, e2 = math.exp(-1), math.exp(-2)
    expect = np.array([[1 - e1, e1 - e2], [0, 1 - e2]])
    assert rel(levy_apply(OneMinusExp(), JORDAN), expect) <= 1e-12


# -- contour calculus ------------------------------------------------------------------------


def test_contour_tau_example():
    out, contour = contour_apply(tau, D12, beta=math.pi / 4, return_contour=True)
    assert rel(out, np.diag([0.25, 2 / 9])) <= 1e-8
    assert contour.orientation == "counterclockwise" and contour.u_range is not None


def test_contour_tau_non_normal():
    R = upper_triangular_resolvent(JORDAN, 1.0)
    assert rel(contour_apply(tau, JORDAN, beta=math.pi / 4), JORDAN @ R @ R) <= 1e-8


def test_contour_vanishing_correction():
    psi = Affine(0.0, 1.0)
    r = lambda lam: resolvent_diff_scalar(psi, lam, 1.0 + 1j)
    assert np.linalg.norm(contour_apply(r, D12, beta=math.pi / 4)) == 0.0


def test_contour_product_rule():
    # F(l) = tau(l) r(l; z) satisfies F(A) = tau(A) r(A; z)
    psi, z = OneMinusExp(), 1.0 + 0.5j
    r = lambda lam: resolvent_diff_scalar(psi, lam, z)
    F = contour_apply(lambda lam: tau(lam) * r(lam), JORDAN, beta=math.pi / 3)
    T = contour_apply(tau, JORDAN, beta=math.pi / 3)
    R = contour_apply(r, JORDAN, beta=math.pi / 3)
    assert rel(F, T @ R) <= 1e-8


def test_contour_errors():
    A = np.diag(np.exp([0.5j, -0.5j]))
    with pytest.raises(ContourError):
        contour_apply(tau, A, beta=0.5 + 1e-4)
    with pytest.raises(DomainError):
        contour_apply(tau, A)
    with pytest.raises(DomainError):
        SectorContour(4.0)


# -- Kato's fractional power resolvent -------------------------------------------------------


def test_kato_examples():
    assert rel(kato_fracpow_resolvent(np.eye(2), 0.5, 1.0), 0.5 * np.eye(2)) <= 1e-10
    b = kato_bound(1.0, 0.5, math.pi / 4, 1.0)
    assert b == pytest.approx((2 / math.pi) * (3 * math.pi / 4) / (math.sqrt(2) / 2))
    assert b >= 0.5 and kato_bound_holds(np.eye(2), 0.5, 1.0, math.pi / 4)
    assert rel(kato_fracpow_resolvent(D14, 0.5, 2.0), np.diag([1 / 3, 1 / 4])) <= 1e-8


def test_kato_near_one_matches_power():
    out = kato_fracpow_resolvent(D14, 0.999, 2.0)
    assert rel(out, eigen_oracle(lambda l: 1 / (l ** 0.999 + 2.0), D14)) <= 1e-10
    # A^r -> A makes the result approach (A + z)^-1; the gap is analytic
    gap = np.linalg.norm(out - np.linalg.inv(D14 + 2 * np.eye(2)), 2)
    assert gap == pytest.approx(1 / (4 ** 0.999 + 2) - 1 / 6, rel=1e-6)


@pytest.mark.xfail(strict=True, reason="(4^0.999 + 2)^-1 - 1/6 = 1.54e-4 exceeds 1e-4")
def test_kato_limit_probe_at_1e4():
    out = kato_fracpow_resolvent(D14, 0.999, 2.0)
    assert np.linalg.norm(out - np.linalg.inv(D14 + 2 * np.eye(2)), 2) <= 1e-4


def test_kato_domain():
    with pytest.raises(DomainError):
        kato_fracpow_resolvent(D14, 0.5, -1.0)
    with pytest.raises(DomainError):
        kato_fracpow_resolvent(D14, 1.0, 1.0)


@given(seeds, st.sampled_from([0.25, 0.5, 0.75]), st.floats(0.1, 10.0), st.floats(-0.7, 0.7))
def test_kato_matches_oracle(seed, r, rad, frac):
    A = normal_from_seed(seed, 3, math.pi / 4)
    z = rad * complex(math.cos(frac * (1 - r) * math.pi), math.sin(frac * (1 - r) * math.pi))
    K = kato_fracpow_resolvent(A, r, z)
    assert rel(K, eigen_oracle(lambda l: 1 / (l ** r + z), A)) <= 1e-7


# -- resolvent identity ------------------------------------------------------------------------


def test_resolvent_identity_examples():
    assert resolvent_identity_residual(Affine(0.0, 1.0), JORDAN, 1.0) <= 1e-10
    assert resolvent_identity_residual(OneMinusExp(), D12, 1.0) <= 1e-6
    z = complex(math.cos(math.pi / 3), math.sin(math.pi / 3))
    assert resolvent_identity_residual(OneMinusExp(), JORDAN, z) <= 1e-5


def test_resolvent_identity_terms_match_closed_forms():
    # diagonal case: each term against its scalar oracle
    psi = OneMinusExp()
    left, right, corr = resolvent_identity_parts(psi, D12, 1.0)
    d = np.array([1.0, 2.0])
    assert rel(left, np.diag(1 / (1 + 1 - np.exp(-d)))) <= 1e-10
    assert rel(right, np.diag(1 / (1 + d / (1 + d)))) <= 1e-10
    assert rel(corr, np.diag([resolvent_diff_scalar(psi, x, 1.0) for x in d])) <= 1e-7


def test_resolvent_identity_domain():
    with pytest.raises(DomainError):
        resolvent_identity_residual(OneMinusExp(), np.diag(np.exp([1.7j, -1.7j])), 1.0)
    with pytest.raises(DomainError):
        resolvent_identity_residual(OneMinusExp(), D12, 0.0)


@pytest.mark.parametrize("seed", [1, 2])
def test_resolvent_identity_random(seed):
    psi = triple_from_seed(seed)
    A = normal_from_seed(seed, 3, math.pi / 3)
    z = complex(0.7, 0.4 * seed)
    assert resolvent_identity_residual(psi, A, z) <= 1e-5


# -- compatibility and composition ------------------------------------------------------------


@given(seeds, st.sampled_from(["sqrt", "pow0.3", "log1p", "ratio"]))
def test_calculi_agree_on_normal_matrices(seed, name):
    psi = {"sqrt": Power(0.5), "pow0.3": Power(0.3), "log1p": Log1p(), "ratio": ratio_cbf(2.0)}[name]
    A = normal_from_seed(seed, 3, math.pi / 3)
    oracle = eigen_oracle(psi, A)
    assert rel(hirsch_apply(psi, A), oracle) <= 1e-6
    assert rel(levy_apply(psi, A), oracle) <= 1e-6


@given(seeds, st.sampled_from([1 / 3, 1 / 2, 2 / 3]))
def test_composition_rule(seed, alpha):
    A = normal_from_seed(seed, 3, math.pi / 3)
    Aa = fractional_power(A, alpha)
    lhs = hirsch_apply(Log1p(), Aa)
    rhs = eigen_oracle(lambda l: np.log1p(l ** alpha), A)
    assert rel(lhs, rhs) <= 1e-6
