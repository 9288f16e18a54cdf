"""Sampled certification of the explicit resolvent constants.

Each suite estimates a supremum of ``||z (z + B)^-1||`` over a sector by
sampling (see :func:`bfcalc.sectorial.sector_sup`) and compares it with the
closed-form right-hand side built from the sampled ``M(A)`` and
``M(A, omega)``.  Margins are normalised as in :mod:`bfcalc.geometry`; the
default tolerance ``1e-4`` absorbs the sampling error of the constants.
"""

import math

import numpy as np
from scipy.linalg import expm

from .calculus import (contour_apply, fractional_power, hirsch_apply,
                       kato_bound, kato_fracpow_resolvent, levy_apply,
                       shift_difference_apply)
from .errors import DomainError, UnsupportedRepresentation
from .geometry import CheckReport, normalised_margin
from .sectorial import ensure_sectorial, make_sectorial, sector_sup

HALF_PI = 0.5 * math.pi
SAMPLING_TOL = 1e-4
IDENTITY_TOL = 1e-8


def _norm(X):
    return float(np.linalg.norm(X, 2))


def _grid_samples(n_angles=17):
    from .sectorial import N_RADII
    return N_RADII * n_angles


def m_tilde(S, alpha, q, gamma, variant="displayed"):
    """``M(A) + 2 M(A, beta) / (pi cos(beta/2) cos(c))`` with
    ``beta = (alpha + (pi - gamma)/q) / 2`` and ``c = q beta / 2``
    (``variant="displayed"``) or ``c = (q beta + gamma)/2`` (``"proof"``)."""
    _check_mn(S, alpha, q, gamma)
    beta = 0.5 * (alpha + (math.pi - gamma) / q)
    if variant == "displayed":
        c = 0.5 * q * beta
    elif variant == "proof":
        c = 0.5 * (q * beta + gamma)
    else:
        raise DomainError("variant must be 'displayed' or 'proof'")
    return S.M + 2.0 * S.M_sector(beta) / (math.pi * math.cos(0.5 * beta) * math.cos(c))


def _check_mn(S, alpha, q, gamma):
    if not (0.0 < alpha < math.pi) or alpha < S.omega - 1e-12:
        raise DomainError("alpha must lie in (0, pi) and cover the spectral angle")
    if not (1.0 < q < math.pi / alpha):
        raise DomainError("q must lie in (1, pi/alpha)")
    if not (0.0 < gamma < math.pi - q * alpha):
        raise DomainError("gamma must lie in (0, pi - q alpha)")


def _sector_factor(q, gamma):
    pq = math.pi / q
    return math.sin(pq) / pq * (pq + gamma) / math.sin(pq + gamma)


def aest_constant(S, alpha, q, gamma, variant="displayed"):
    if not (0.0 < gamma < (1.0 - 1.0 / q) * math.pi):
        raise DomainError("gamma must lie in (0, (1 - 1/q) pi)")
    return m_tilde(S, alpha, q, gamma, variant) * _sector_factor(q, gamma)


def aesa_constant(S, theta, q, gamma, variant="displayed"):
    """``C~_{q,gamma}(theta)``: the Aest constant at ``alpha = pi/2 - theta``
    plus ``4 M(A, pi/2 + theta - delta/2) / (pi sin^2(theta/2) sin^2(delta/4))``."""
    alpha = HALF_PI - theta
    if not (0.0 < theta <= HALF_PI):
        raise DomainError("theta must lie in (0, pi/2]")
    if not (2.0 < q < math.pi / alpha):
        raise DomainError("q must lie in (2, pi/alpha)")
    if not (HALF_PI < gamma < (1.0 - 1.0 / q) * math.pi):
        raise DomainError("gamma must lie in (pi/2, (1 - 1/q) pi)")
    delta = HALF_PI + theta - gamma
    first = aest_constant(S, alpha, q, gamma, variant)
    second = 4.0 * S.M_sector(HALF_PI + theta - 0.5 * delta) / (
        math.pi * math.sin(0.5 * theta) ** 2 * math.sin(0.25 * delta) ** 2)
    return first + second


def _default_alpha(S, alpha):
    if alpha is None:
        alpha = max(S.omega, 1e-2)
    return float(alpha)


def _report(ident, lhs, rhs, worst, tol, params, history=None, samples=None):
    margin = float(normalised_margin(lhs, rhs))
    return CheckReport(ident, samples or _grid_samples(), margin, None, worst,
                       bool(margin >= -tol), tol, constant=float(rhs),
                       params=params, refinement=list(history or []))


def _psi_of_A(psi, S, calculus):
    if calculus == "hirsch":
        try:
            return hirsch_apply(psi, S)
        except UnsupportedRepresentation:
            raise DomainError("suite needs a complete Bernstein function")
    return levy_apply(psi, S)


def bound_suite(psi, A, suite, tol=SAMPLING_TOL, variant="displayed", **params):
    """Run one explicit-constant check.

    Suites and parameters:

    * ``FRPOW1``: ``sup_s ||s (f(A)+s)^-1|| <= M(A)`` for complete Bernstein ``f``.
    * ``ZZZ``: ``sup_{z in Sigma_gamma} ||z (A^r + z)^-1||`` against Kato's
      constant (``r``, ``gamma``); ``psi`` is ignored.
    * ``MES0``: ``||z (A^q + z)^-1|| <= M~`` (``alpha``, ``q``, ``gamma``); ``psi`` ignored.
    * ``AEST``: ``||z (psi(A) + z)^-1||`` for complete Bernstein ``psi``
      (``alpha``, ``q``, ``gamma``).
    * ``AESA``: the same for any Bernstein ``psi`` with ``gamma > pi/2``
      (``theta``, ``q``, ``gamma``).
    * ``SUPG``: resolvent sup <= semigroup sup of ``psi(A)`` <= semigroup sup of ``A``.
    * ``FPSI``: ``(1/psi)(A)`` by the regularised contour calculus equals
      ``psi(A)^-1`` (residual check).
    """
    S = ensure_sectorial(A)
    suite = suite.upper()
    if suite == "FRPOW1":
        FA = _psi_of_A(psi, S, "hirsch")
        lhs, worst, hist = sector_sup(FA, 0.0, n_radii=256)
        return _report("FRPOW1", max(lhs, 1.0), S.M, worst, tol, {}, hist, 256)

    if suite == "ZZZ":
        r = float(params.get("r", 0.5))
        if not (0.0 < r < 1.0):
            raise DomainError("r must lie in (0, 1)")
        gamma = float(params.get("gamma", 0.5 * (1.0 - r) * math.pi))
        if not (0.0 < gamma < (1.0 - r) * math.pi):
            raise DomainError("gamma must lie in (0, (1-r) pi)")
        Ar = fractional_power(S, r)
        lhs, worst, hist = sector_sup(Ar, gamma)
        rhs = kato_bound(S.M, r, gamma, 1.0)
        # cross-check the sampled worst point against Kato's integral
        wz = worst if abs(np.angle(worst)) < gamma else abs(worst) * np.exp(
            1j * np.sign(np.angle(worst)) * gamma * (1 - 1e-9))
        direct = np.linalg.inv(Ar + wz * np.eye(S.n))
        kato = kato_fracpow_resolvent(S, r, wz, gamma)
        dev = _norm(kato - direct) / max(_norm(direct), 1e-300)
        return _report("ZZZ", lhs, rhs, worst, tol,
                       {"r": r, "gamma": gamma, "kato_deviation": dev}, hist)

    if suite in ("MES0", "AEST"):
        alpha = _default_alpha(S, params.get("alpha"))
        q = float(params.get("q", min(2.0, 0.5 * (1.0 + math.pi / alpha))))
        gmax = math.pi - q * alpha
        if suite == "AEST":
            gmax = min(gmax, (1.0 - 1.0 / q) * math.pi)
        gamma = float(params.get("gamma", 0.5 * gmax))
        if suite == "MES0":
            B = fractional_power(S, q)
            rhs = m_tilde(S, alpha, q, gamma, variant)
            other = m_tilde(S, alpha, q, gamma, "proof" if variant == "displayed" else "displayed")
        else:
            B = _psi_of_A(psi, S, "hirsch")
            rhs = aest_constant(S, alpha, q, gamma, variant)
            other = aest_constant(S, alpha, q, gamma,
                                  "proof" if variant == "displayed" else "displayed")
        lhs, worst, hist = sector_sup(B, gamma)
        return _report(suite, lhs, rhs, worst, tol,
                       {"alpha": alpha, "q": q, "gamma": gamma, "other_variant": other}, hist)

    if suite == "AESA":
        if S.omega >= HALF_PI:
            raise DomainError("AESA needs spectral angle below pi/2")
        theta = float(params.get("theta", HALF_PI - max(S.omega, 1e-2)))
        alpha = HALF_PI - theta
        if alpha < S.omega - 1e-12:
            raise DomainError("theta too large for the spectral angle of A")
        qmax = min(math.pi / alpha, HALF_PI / alpha)
        if qmax <= 2.0:
            raise DomainError("AESA needs pi/2 - theta < pi/4 so that gamma > pi/2 fits")
        q = float(params.get("q", 0.5 * (2.0 + min(qmax, 8.0))))
        gmax = min((1.0 - 1.0 / q) * math.pi, math.pi - q * alpha)
        gamma = float(params.get("gamma", 0.5 * (HALF_PI + gmax)))
        rhs = aesa_constant(S, theta, q, gamma, variant)
        B = levy_apply(psi, S)
        lhs, worst, hist = sector_sup(B, gamma)
        return _report("AESA", lhs, rhs, worst, tol,
                       {"theta": theta, "q": q, "gamma": gamma}, hist)

    if suite == "SUPG":
        B = levy_apply(psi, S)
        lhs, worst, hist = sector_sup(B, 0.0, n_radii=256)
        lhs = max(lhs, 1.0)
        middle = make_sectorial(B).semigroup_sup() if np.any(B) else 1.0
        rhs = S.semigroup_sup()
        m1 = float(normalised_margin(lhs, middle))
        m2 = float(normalised_margin(middle, rhs))
        margin = min(m1, m2)
        return CheckReport("SUPG", 256, margin, None, worst, bool(margin >= -tol), tol,
                           constant=rhs, params={"resolvent_sup": lhs, "psi_semigroup_sup": middle,
                                                 "M_hat": S.M},
                           refinement=hist)

    if suite == "FPSI":
        return _fpsi(psi, S, float(params.get("eps", 1.0)), tol=params.get("id_tol", IDENTITY_TOL))

    raise DomainError("unknown bound suite %r" % (suite,))


def _fpsi(psi, S, eps, tol):
    if S.omega >= HALF_PI:
        raise DomainError("FPSI needs spectral angle below pi/2")
    n = S.n
    eye = np.eye(n, dtype=complex)
    M = S.A

    def tau_eps(lam):
        return (lam / ((eps + lam) * (1.0 + eps * lam))) ** 2

    beta = 0.5 * (S.omega + HALF_PI)
    g = contour_apply(lambda lam: tau_eps(lam) / psi(lam), S, beta=beta)
    T = M @ np.linalg.inv(eps * eye + M) @ np.linalg.inv(eye + eps * M)
    T = T @ T
    fA = np.linalg.solve(T, g)
    inv = np.linalg.inv(levy_apply(psi, S))
    res = _norm(fA - inv) / max(_norm(inv), 1e-300)
    return CheckReport("FPSI", 1, -res, None, None, bool(res <= tol), tol,
                       params={"residual": res, "eps": eps, "beta": beta})


def shift_identity_check(psi, A, eps, d=None, ts=(0.5, 1.0, 2.0), tol=IDENTITY_TOL):
    """Shift identities for a Lévy triple.

    (a) ``psi(A + eps) = psi(A) + [psi(. + eps) - psi(.)](A)``, the last
        term from its own Hille-Phillips integral;
    (b) ``||psi(A + eps) - psi(A)|| <= M (psi(eps) - psi(0))`` with
        ``M = sup_t ||exp(-tA)||``;
    (c) with ``d``: ``exp(-t psi(A)) = exp(-t psi(A + d)) exp(t B_d)`` at each ``t``.
    """
    S = ensure_sectorial(A)
    n = S.n
    eye = np.eye(n, dtype=complex)
    base = levy_apply(psi, S)
    shifted = levy_apply(psi, S.A + eps * eye)
    diff = shift_difference_apply(psi, S, eps)
    scale = max(_norm(shifted), 1.0)
    res_a = _norm(shifted - base - diff) / scale
    Msg = S.semigroup_sup()
    lhs_b = _norm(shifted - base)
    rhs_b = Msg * float(np.real(psi(eps) - psi(0.0)))
    margin_b = float(normalised_margin(lhs_b, rhs_b))
    params = {"eps": eps, "residual_a": res_a, "margin_b": margin_b, "M": Msg}
    worst = min(-res_a, margin_b)
    if d is not None:
        Bd = shift_difference_apply(psi, S, d) if d > 0 else np.zeros((n, n), dtype=complex)
        psi_d = levy_apply(psi, S.A + d * eye)
        res_c = 0.0
        for t in ts:
            lhs = expm(-t * base)
            rhs = expm(-t * psi_d) @ expm(t * Bd)
            res_c = max(res_c, _norm(lhs - rhs) / max(_norm(lhs), 1e-300))
        params.update({"d": d, "residual_c": res_c})
        worst = min(worst, -res_c)
    return CheckReport("SHIFT", 1, worst, None, None, bool(worst >= -tol), tol, params=params)
