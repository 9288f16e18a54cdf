import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bfcalc.bernstein import Affine, Compose, Log1p, OneMinusExp, Power, Sum
from bfcalc.errors import DomainError, UnsupportedRepresentation
from bfcalc.geometry import (CHECKS, SamplingPlan, Sector, carasso_kato_check, cbf_sector_check,
                             cbf_shrink_angles, check_inequality, contour_bound,
                             contour_bound_check, fujita_ratio_probe, improving_angles)
from conftest import triple_from_seed

seeds = st.integers(0, 2 ** 32 - 1)
SMALL = SamplingPlan(n_radii=24, n_angles=9)


def test_feh_identity_equality():
    # psi = z, lambda = 1, z = e^{i pi/4}: |1 + e^{i pi/4}| = 2 cos(pi/8)
    z = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    plan = SamplingPlan(points=((1.0, z),))
    rep = check_inequality("FEH", Affine(0.0, 1.0), plan, gamma=math.pi / 4, beta=1e-12)
    assert abs(1 + z) == pytest.approx(2 * math.cos(math.pi / 8), abs=1e-15)
    assert abs(rep.worst_margin) <= 1e-12
    assert rep.passed


def test_re_example():
    psi = OneMinusExp()
    lam = 1 + 1j
    assert psi(lam).real == pytest.approx(1 - math.exp(-1) * math.cos(1), abs=1e-12)
    assert psi(lam).real == pytest.approx(0.801, abs=1e-3)
    rep = check_inequality("RE", psi, SamplingPlan(points=((lam, None),)))
    assert rep.worst_margin > 0.1


def test_sect_sqrt():
    rep = check_inequality("SECT", Power(0.5), SamplingPlan(n_radii=40, n_angles=25), omega=math.pi / 3)
    assert rep.samples == 1000 and rep.passed


@pytest.mark.parametrize("ident", sorted(CHECKS))
def test_every_check_passes_on_closed_forms(ident):
    for psi in (Power(0.5), Log1p(), OneMinusExp()):
        assert check_inequality(ident, psi, SMALL).passed


def test_associated_checks_need_a_triple():
    with pytest.raises(UnsupportedRepresentation):
        check_inequality("L12", Compose(Log1p(), Power(0.5)), SMALL)


def test_unknown_check():
    with pytest.raises(DomainError):
        check_inequality("NOPE", Power(0.5))


@given(seeds, st.sampled_from(sorted(CHECKS)))
def test_random_triples_pass(seed, ident):
    assert check_inequality(ident, triple_from_seed(seed), SMALL).passed


@given(seeds, st.floats(0.05, 1.5), st.floats(1e-4, 1e4))
def test_sector_preservation_pointwise(seed, omega, r):
    psi = triple_from_seed(seed)
    lam = r * np.exp(1j * np.linspace(-omega, omega, 9))
    assert np.all(np.abs(np.angle(psi(lam))) <= omega + 1e-12)


def test_report_serialisation():
    d = check_inequality("R1", Log1p(), SMALL).to_dict()
    assert set(d) >= {"id", "samples", "worst_margin", "worst_point", "pass"}
    assert set(d["worst_point"]) == {"lambda", "z"}


def test_sector_membership():
    s = Sector(math.pi / 4)
    assert s.contains(np.array([1.0, 1j])).tolist() == [True, False]


# -- angle arithmetic ------------------------------------------------------------------


def test_shrink_angles_examples():
    theta0, _ = cbf_shrink_angles(math.pi / 4, math.pi / 2)
    assert theta0 == pytest.approx(2 * math.pi / 3)
    _, tt = cbf_shrink_angles(math.pi / 4, math.pi / 2 + 1e-9)
    assert tt == pytest.approx(math.pi / 4, abs=1e-8)
    _, tt = cbf_shrink_angles(math.pi / 4, theta0)
    assert tt == pytest.approx(math.pi / 2)
    with pytest.raises(DomainError):
        cbf_shrink_angles(math.pi / 4, 2.5)


@given(st.floats(0.05, 1.5), st.floats(0.001, 0.999), st.floats(0.001, 0.999))
def test_shrink_angles_range_and_monotone(gamma, u, v):
    theta0, _ = cbf_shrink_angles(gamma, math.pi / 2)
    a, b = sorted((u, v))
    t1 = math.pi / 2 + a * (theta0 - math.pi / 2)
    t2 = math.pi / 2 + b * (theta0 - math.pi / 2)
    x1, x2 = cbf_shrink_angles(gamma, t1)[1], cbf_shrink_angles(gamma, t2)[1]
    assert 0 < x1 <= math.pi / 2 and 0 < x2 <= math.pi / 2
    assert x1 <= x2 + 1e-12


def test_cbf_sector_check_sqrt():
    reports = cbf_sector_check(Power(0.5), math.pi / 4, 1.8, SMALL)
    assert reports["hypothesis"].passed
    assert reports["upper"].passed and reports["full"].passed


def test_improving_angles_examples():
    assert improving_angles("BHH", math.pi / 2, 3 * math.pi / 4) == pytest.approx(math.pi / 6)
    assert improving_angles("CK", theta=3 * math.pi / 4) == pytest.approx(math.pi / 6)
    assert improving_angles("BHHT", 2.0, 2.0, theta0=math.pi / 2) == pytest.approx(math.pi / 2)
    with pytest.raises(DomainError):
        improving_angles("CK", theta=0.3)


@given(st.floats(0.1, 1.5), st.floats(1.6, 3.0))
def test_bhht_tends_to_bhh(t1, t2):
    # theta0 -> 0 removes the holomorphy of -A and recovers the plain angle
    near = improving_angles("BHHT", t1, t2, theta0=1e-9)
    assert near == pytest.approx(improving_angles("BHH", t1, t2), abs=1e-8)


# -- contour bound ---------------------------------------------------------------------


def test_contour_bound_identity_function():
    res = contour_bound_check(Affine(0.0, 1.0), 1.0, 3 * math.pi / 4, math.pi / 8)
    assert res.integral == 0.0 and res.passed


def test_contour_bound_example():
    omega, beta = 3 * math.pi / 4, math.pi / 8
    b = contour_bound(omega, beta, 1.0)
    assert math.cos(beta) ** 2 == pytest.approx(0.853553, abs=1e-6)
    assert math.cos(0.5 * (omega + beta)) ** 2 == pytest.approx(0.038060, abs=1e-6)
    assert b == pytest.approx(246.2566, abs=1e-3)
    res = contour_bound_check(OneMinusExp(), 1.0, omega, beta)
    assert res.converged and res.integral < b


def test_contour_bound_scaling():
    # the bound is exactly proportional to 1/|z|; the integrand behaves like
    # |D(l)| / |z|^2 for large |z|, so the integral decays one power faster
    omega, beta = 3 * math.pi / 4, math.pi / 8
    r = {z: contour_bound_check(OneMinusExp(), z, omega, beta) for z in (1.0, 100.0, 1e3, 1e4)}
    assert r[1.0].bound / r[100.0].bound == pytest.approx(100.0)
    assert r[1.0].integral / r[100.0].integral > 100.0
    assert r[1e3].integral / r[1e4].integral == pytest.approx(100.0, rel=0.05)
    assert all(res.passed for res in r.values())


def test_contour_bound_domain():
    with pytest.raises(DomainError):
        contour_bound_check(OneMinusExp(), 1.0, 1.0, 0.3)
    with pytest.raises(DomainError):
        contour_bound_check(OneMinusExp(), -1.0, 2.0, 0.3)


# -- Carasso-Kato evidence -----------------------------------------------------------------


def test_carasso_kato_examples():
    v = carasso_kato_check(Log1p(), gamma=math.pi / 2 - 0.01, beta=100.0, plan=SMALL)
    assert v.passed
    assert not carasso_kato_check(Affine(0.0, 1.0), gamma=math.pi / 2 - 1e-3, plan=SMALL).passed
    assert carasso_kato_check(Power(0.5), gamma=math.pi / 4, plan=SMALL).passed


def test_log1p_imaginary_part_bounded():
    z = np.geomspace(1e-6, 1e6, 50) * 1j
    assert np.all(np.abs(Log1p()(z).imag) <= math.pi / 2)


def test_fujita_probe():
    rows = fujita_ratio_probe(Power(0.3), 0.3, [0.0, 0.5, 1.0], [1.0, 10.0])
    assert max(r["deviation"] for r in rows) <= 1e-14
    (row,) = fujita_ratio_probe(Log1p(), 0.0, [math.pi / 4], [1e6])
    # log(1 + r e^{i theta}) / log(1 + r) = 1 + i theta / log r + O(1/r)
    assert abs(complex(row["re_ratio"], row["im_ratio"]) - (1 + 1j * math.pi / 4 / math.log(1e6))) <= 1e-5
    f = Sum([Affine(0.0, 1.0), Power(0.5)])
    (row,) = fujita_ratio_probe(f, 1.0, [math.pi / 4], [1e6])
    assert row["deviation"] <= 1e-2
