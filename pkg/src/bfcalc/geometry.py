"""Sector geometry and sampled checks of the scalar inequalities.

Every check here is falsification by sampling: a grid of log-spaced radii
times equispaced angles, followed by golden-section refinement along the
ray carrying the worst sample.  A passing report is evidence, not proof.

Margins are normalised as ``(rhs - lhs) / max(1, |lhs|, |rhs|)`` so the
tolerance acts absolutely for O(1) quantities and relatively otherwise.
"""

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .quadrature import adaptive_line, power_tail

HALF_PI = 0.5 * math.pi
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Sector:
    """``Sigma_beta = {|arg z| < beta}``, optionally capped at ``|z| < R`` or
    restricted to the upper half (``0 <= arg z < beta``)."""

    beta: float
    radius: Optional[float] = None
    upper: bool = False

    def __post_init__(self):
        if not (0.0 < self.beta <= math.pi):
            raise DomainError("sector half-angle must lie in (0, pi]")
        if self.radius is not None and not self.radius > 0:
            raise DomainError("sector radius must be positive")

    def contains(self, z, closed=True, tol=1e-12):
        z = np.asarray(z, dtype=complex)
        arg = np.angle(z)
        if closed:
            ok = np.abs(arg) <= self.beta + tol
        else:
            ok = (np.abs(arg) < self.beta) & (z != 0)
        if self.upper:
            ok &= arg >= -tol
        if self.radius is not None:
            ok &= (np.abs(z) <= self.radius) if closed else (np.abs(z) < self.radius)
        return ok


@dataclass(frozen=True)
class SamplingPlan:
    """Log-radial by angular grid.

    ``points`` overrides the grid with explicit ``(lambda, z)`` pairs
    (``z`` may be ``None`` for checks that take one argument).
    """

    n_radii: int = 64
    n_angles: int = 33
    r_min: float = 1e-6
    r_max: float = 1e6
    refine: bool = True
    refine_iter: int = 40
    points: Optional[tuple] = None

    def __post_init__(self):
        if self.n_radii < 2 or self.n_angles < 2:
            raise DomainError("sampling plan needs at least 2 radii and 2 angles")
        if not (0 < self.r_min < self.r_max):
            raise DomainError("sampling plan needs 0 < r_min < r_max")

    @property
    def size(self):
        return len(self.points) if self.points is not None else self.n_radii * self.n_angles

    def radii(self, lo=None, hi=None):
        return np.geomspace(lo or self.r_min, hi or self.r_max, self.n_radii)

    def angles(self, lo, hi, closed=True):
        if closed:
            return np.linspace(lo, hi, self.n_angles)
        step = (hi - lo) / self.n_angles
        return lo + step * (np.arange(self.n_angles) + 0.5)


@dataclass
class CheckReport:
    """Outcome of one sampled check; ``passed`` iff ``worst_margin >= -tol``."""

    id: str
    samples: int
    worst_margin: float
    worst_lambda: complex
    worst_z: Optional[complex]
    passed: bool
    tol: float = DEFAULT_TOL
    constant: Optional[float] = None
    params: dict = field(default_factory=dict)
    refinement: list = field(default_factory=list)

    def to_dict(self):
        def pair(v):
            return None if v is None else [float(np.real(v)), float(np.imag(v))]

        out = {
            "id": self.id,
            "samples": int(self.samples),
            "worst_margin": float(self.worst_margin),
            "worst_point": {"lambda": pair(self.worst_lambda), "z": pair(self.worst_z)},
            "pass": bool(self.passed),
        }
        if self.constant is not None:
            out["constant"] = float(self.constant)
        if self.params:
            out["params"] = {k: float(v) for k, v in sorted(self.params.items())}
        return out


def normalised_margin(lhs, rhs):
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return (rhs - lhs) / scale


# ---------------------------------------------------------------------------
# inequality definitions


def _angle_param(params, key, default, lo, hi, closed_hi=False):
    v = float(params.get(key, default))
    if not (lo < v < hi or (closed_hi and v == hi)):
        raise DomainError("%s=%g outside the admissible range" % (key, v))
    return v


class _Check:
    """One inequality: a sample domain, a z-pairing rule and the two sides."""

    needs_z = False
    constant = None
    params = {}

    def __init__(self, psi, params):
        self.psi = psi
        self.params = {}

    # sample domain: (radii, angles); z pairing from the sample indices
    def domain(self, plan):
        raise NotImplementedError

    def make_z(self, lam, zrel):
        return None

    def sides(self, lam, z):
        raise NotImplementedError


class _FEH(_Check):
    needs_z = True

    def __init__(self, psi, params):
        self.psi = psi
        g = _angle_param(params, "gamma", 0.6 * math.pi, 0.0, math.pi)
        b = _angle_param(params, "beta", 0.35 * math.pi, 0.0, HALF_PI)
        if g + b >= math.pi:
            raise DomainError("FEH needs gamma + beta < pi")
        self.gamma, self.beta = g, b
        self.params = {"gamma": g, "beta": b}
        self.constant = math.cos(0.5 * (g + b))

    def domain(self, plan):
        radii = plan.radii()
        angles = plan.angles(-self.beta, self.beta)
        m = len(angles)
        ratios = np.logspace(-2.0, 2.0, m)
        i, j = np.meshgrid(np.arange(len(radii)), np.arange(m), indexing="ij")
        # z sits on the opposite edge of its sector, with modulus comparable
        # to |psi(lambda)|: the configuration where the bound is sharp
        zrel = ratios[i % m] * np.exp(-1j * self.gamma * angles[j] / self.beta)
        return radii, angles, zrel

    def make_z(self, lam, zrel):
        size = np.abs(self.psi(lam))
        size = np.where(size > 0, size, np.abs(lam))
        return zrel * size

    def sides(self, lam, z):
        p = self.psi(lam)
        return self.constant * (np.abs(z) + np.abs(p)), np.abs(z + p)


class _RE(_Check):
    def domain(self, plan):
        return plan.radii(), plan.angles(-HALF_PI, HALF_PI), None

    def sides(self, lam, z):
        return np.real(self.psi(np.real(lam))), np.real(self.psi(lam))


class _R1(_Check):
    def __init__(self, psi, params):
        self.psi = psi
        self.beta = _angle_param(params, "beta", math.pi / 3, 0.0, HALF_PI)
        self.params = {"beta": self.beta}

    def domain(self, plan):
        return plan.radii(), plan.angles(-self.beta, self.beta), None

    def sides(self, lam, z):
        t = np.abs(lam)
        return np.real(self.psi(t * np.cos(np.angle(lam)))), np.abs(self.psi(lam))


class _CPSI(_Check):
    def __init__(self, psi, params):
        self.psi = psi
        self.constant = psi.c_psi()

    def domain(self, plan):
        return plan.radii(1.0, max(plan.r_max, 1.0) * 1.000001), plan.angles(-HALF_PI, HALF_PI), None

    def sides(self, lam, z):
        return np.abs(self.psi(lam)), self.constant * np.abs(lam)


class _LOW(_Check):
    def __init__(self, psi, params):
        self.psi = psi
        self.beta = _angle_param(params, "beta", math.pi / 3, 0.0, HALF_PI)
        self.params = {"beta": self.beta}
        self.constant = float(np.real(psi.derivative(1.0, 1)))

    def domain(self, plan):
        return plan.radii(min(plan.r_min, 1.0) * 0.999999, 1.0), plan.angles(-self.beta, self.beta), None

    def sides(self, lam, z):
        return np.abs(lam) * self.constant * math.cos(self.beta), np.abs(self.psi(lam))


class _AREP1(_Check):
    def __init__(self, psi, params):
        self.psi = psi
        self.phi = psi.associated()

    def domain(self, plan):
        return plan.radii(), plan.angles(-HALF_PI, HALF_PI, closed=False), None

    def sides(self, lam, z):
        u = np.real(lam)
        # phi(u) = psi(u) - D(u) keeps the cancellation inside D
        phi_u = np.real(self.psi(u)) - np.real(self.phi.defect(u))
        return phi_u, np.real(self.psi(lam))


class _L12(_Check):
    def __init__(self, psi, params):
        self.psi = psi
        self.phi = psi.associated()

    def domain(self, plan):
        return plan.radii(), plan.angles(-HALF_PI, HALF_PI, closed=False), None

    def sides(self, lam, z):
        u = np.real(lam)
        d2 = np.abs(np.real(self.phi.derivative(u, 2)))
        return np.abs(self.phi.defect(lam)), 2.0 * np.abs(lam) ** 2 * d2


class _L22(_Check):
    def __init__(self, psi, params):
        self.psi = psi
        self.phi = psi.associated()
        self.beta = _angle_param(params, "beta", math.pi / 3, 0.0, HALF_PI)
        self.params = {"beta": self.beta}

    def domain(self, plan):
        return plan.radii(), plan.angles(-self.beta, self.beta), None

    def sides(self, lam, z):
        u = np.real(lam)
        d1 = np.real(self.phi.derivative(u, 1))
        return (np.abs(self.phi.defect(lam)),
                4.0 * np.abs(lam) * d1 / math.cos(self.beta))


class _SECT(_Check):
    def __init__(self, psi, params):
        self.psi = psi
        self.omega = _angle_param(params, "omega", math.pi / 3, 0.0, HALF_PI)
        self.params = {"omega": self.omega}

    def domain(self, plan):
        return plan.radii(), plan.angles(-self.omega, self.omega), None

    def sides(self, lam, z):
        return np.abs(np.angle(self.psi(lam))), np.full(np.shape(lam), self.omega)


CHECKS = {
    "FEH": _FEH, "RE": _RE, "R1": _R1, "CPSI": _CPSI, "LOW": _LOW,
    "AREP1": _AREP1, "L12": _L12, "L22": _L22, "SECT": _SECT,
}


def _margins(chk, lam, z):
    lhs, rhs = chk.sides(lam, z)
    return normalised_margin(lhs, rhs)


def _refine_ray(chk, plan, radii, i, angle, zrel):
    """Golden-section search for the smallest margin between neighbouring radii."""
    lo = math.log(radii[max(i - 1, 0)])
    hi = math.log(radii[min(i + 1, len(radii) - 1)])
    if hi <= lo:
        return None

    def point(u):
        lam = np.array([math.exp(u) * complex(math.cos(angle), math.sin(angle))])
        z = chk.make_z(lam, np.array([zrel])) if chk.needs_z else None
        return lam, z

    def objective(u):
        lam, z = point(u)
        m = _margins(chk, lam, z)[0]
        return m if np.isfinite(m) else math.inf

    res = minimize_scalar(objective, bracket=None, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10, "maxiter": plan.refine_iter})
    lam, z = point(res.x)
    return float(res.fun), lam[0], (None if z is None else z[0])


def check_inequality(ident, psi, plan=None, tol=DEFAULT_TOL, **params):
    """Sample both sides of inequality ``ident`` and report the worst margin.

    ``ident`` is one of :data:`CHECKS`.  Angle parameters (``gamma``,
    ``beta``, ``omega``) default to the values documented in the README.
    """
    if ident not in CHECKS:
        raise DomainError("unknown inequality id %r" % (ident,))
    plan = plan or SamplingPlan()
    chk = CHECKS[ident](psi, params)

    if plan.points is not None:
        lam = np.array([complex(p[0]) for p in plan.points])
        z = None
        if chk.needs_z:
            z = np.array([complex(p[1]) for p in plan.points])
        m = _margins(chk, lam, z)
        k = int(np.nanargmin(m)) if np.any(np.isfinite(m)) else 0
        worst = float(m[k]) if m.size else math.inf
        return CheckReport(ident, m.size, worst, lam[k], None if z is None else z[k],
                           bool(worst >= -tol), tol, chk.constant, dict(chk.params))

    radii, angles, zrel = chk.domain(plan)
    lam = radii[:, None] * np.exp(1j * angles)[None, :]
    z = chk.make_z(lam, zrel) if chk.needs_z else None
    m = _margins(chk, lam, z)
    m = np.where(np.isnan(m), -math.inf, m)
    k = int(np.argmin(m))
    i, j = np.unravel_index(k, m.shape)
    worst = float(m[i, j])
    wl = lam[i, j]
    wz = None if z is None else z[i, j]
    history = []
    if plan.refine and np.isfinite(worst):
        found = _refine_ray(chk, plan, radii, i, angles[j],
                            None if zrel is None else zrel[i, j])
        if found is not None:
            history.append(found[0])
            if found[0] < worst:
                worst, wl, wz = found
    return CheckReport(ident, m.size, worst, wl, wz, bool(worst >= -tol), tol,
                       chk.constant, dict(chk.params), history)


# ---------------------------------------------------------------------------
# sector shrinking for complete Bernstein functions


def cbf_shrink_angles(gamma, theta):
    """``(theta0, theta_tilde)`` for a CBF with range in the closed sector of
    half-angle ``gamma``.

    ``theta0`` solves ``|cos theta0| = cot g / (1 + cot g)`` in
    ``(pi/2, pi)``; ``theta_tilde`` solves ``cot theta_tilde = alpha(theta)``.
    The closed interval ``[pi/2, theta0]`` is accepted for ``theta`` so the
    endpoint values are available.
    """
    if not (0.0 < gamma < HALF_PI):
        raise DomainError("gamma must lie in (0, pi/2)")
    cg = 1.0 / math.tan(gamma)
    k = cg / (1.0 + cg)
    theta0 = math.acos(-k)
    if not (HALF_PI <= theta <= theta0):
        raise DomainError("theta must lie in [pi/2, theta0] = [%.6f, %.6f]" % (HALF_PI, theta0))
    alpha = (1.0 + cg) / math.sin(theta) * (k - abs(math.cos(theta)))
    return theta0, math.atan2(1.0, max(alpha, 0.0))


def _eval_anywhere(psi, lam):
    """``psi`` on the half-plane, its extension elsewhere on the slit plane."""
    lam = np.asarray(lam, dtype=complex)
    out = np.empty(lam.shape, dtype=complex)
    inside = lam.real >= 0
    if np.any(inside):
        out[inside] = psi(lam[inside])
    if np.any(~inside):
        out[~inside] = psi.extend(lam[~inside])
    return out


def cbf_sector_check(psi, gamma, theta, plan=None, tol=DEFAULT_TOL):
    """Sample the sector-shrinking statement under both readings.

    Returns ``{"hypothesis", "upper", "full"}`` reports: the hypothesis
    ``psi(closed C+)`` inside the closed ``gamma`` sector; the upper-half
    reading ``0 <= arg psi <= theta_tilde`` for ``0 <= arg l <= theta``; and the
    full reading ``|arg psi| <= theta_tilde`` for ``|arg l| <= theta``.
    """
    plan = plan or SamplingPlan()
    theta0, tt = cbf_shrink_angles(gamma, theta)
    radii = plan.radii()
    params = {"gamma": gamma, "theta": theta, "theta0": theta0, "theta_tilde": tt}

    def report(ident, lo, hi, target, lower):
        angles = plan.angles(lo, hi)
        lam = radii[:, None] * np.exp(1j * angles)[None, :]
        arg = np.angle(_eval_anywhere(psi, lam))
        m = target - np.abs(arg)
        if lower:
            m = np.minimum(m, arg)
        k = np.unravel_index(int(np.argmin(m)), m.shape)
        worst = float(m[k])
        return CheckReport(ident, m.size, worst, lam[k], None, worst >= -tol, tol,
                           tt, dict(params))

    return {
        "hypothesis": report("PI", -HALF_PI, HALF_PI, gamma, False),
        "upper": report("PI1_UPPER", 0.0, theta, tt, True),
        "full": report("PI1_FULL", -theta, theta, tt, False),
    }


# ---------------------------------------------------------------------------
# contour bound for the resolvent difference


def contour_bound(omega, beta, z):
    """``8 / (cos^2 beta cos^2((omega+beta)/2) |z|)``."""
    return 8.0 / (math.cos(beta) ** 2 * math.cos(0.5 * (omega + beta)) ** 2 * abs(z))


@dataclass
class ContourCheck:
    integral: float
    bound: float
    passed: bool
    error: float
    tail: float
    u_range: tuple
    converged: bool = True

    def to_dict(self):
        return {"integral": self.integral, "bound": self.bound, "pass": self.passed,
                "error": self.error, "tail": self.tail, "u_range": list(self.u_range),
                "converged": self.converged}


_U_LIMIT = 650.0


def contour_bound_check(psi, z, omega, beta, rtol=1e-8, phi=None):
    """Integrate ``|r(l; z)| |dl| / |l|`` over both rays of ``d Sigma_beta``.

    With ``l = exp(u +- i beta)`` the measure becomes ``du``.  The range in
    ``u`` grows in steps until the estimated tail beyond each end is below
    ``rtol`` times the integral; ``integral`` includes that tail estimate.
    When ``|u|`` reaches the overflow limit first, ``converged`` is false and
    ``tail`` carries the achieved accuracy.
    """
    z = complex(z)
    if not (HALF_PI < omega < math.pi):
        raise DomainError("omega must lie in (pi/2, pi)")
    if not (0.0 < beta < math.pi - omega):
        raise DomainError("beta must lie in (0, pi - omega)")
    if z == 0 or abs(np.angle(z)) >= omega:
        raise DomainError("z must lie in the open sector of half-angle omega")
    phi = phi if phi is not None else psi.associated()
    bound = contour_bound(omega, beta, z)
    rays = np.exp(1j * np.array([beta, -beta]))

    def integrand(u):
        u = np.asarray(u, dtype=float)
        lam = (np.exp(u)[:, None] * rays[None, :]).ravel()
        d = phi.defect(lam)
        r = -d / ((z + psi(lam)) * (z + phi(lam)))
        return np.abs(r).reshape(u.size, 2).sum(axis=1)

    width = 1.0
    lo, hi = -30.0, 30.0
    total, err = adaptive_line(integrand, np.arange(lo, hi + width / 2, width), rtol=rtol * 0.1)

    def tail(edge, step):
        f0, f1 = integrand(np.array([edge, edge + step]))
        return power_tail(f0, f1, edge, step)

    for side in (-1.0, 1.0):
        while True:
            edge = lo if side < 0 else hi
            t = tail(edge, side)
            if t <= rtol * 0.1 * max(total, 1e-300) or abs(edge) >= _U_LIMIT:
                break
            new = edge + side * 20.0
            seg = np.arange(min(edge, new), max(edge, new) + width / 2, width)
            part, perr = adaptive_line(integrand, seg, rtol=rtol * 0.1,
                                       atol=rtol * 0.1 * max(total, 1e-300))
            total += part
            err += perr
            if side < 0:
                lo = new
            else:
                hi = new
    tail_est = tail(lo, -1.0) + tail(hi, 1.0)
    converged = bool(tail_est <= rtol * max(total, 1e-300) and err <= rtol * max(total, 1e-300))
    estimate = float(total + tail_est)
    # the integrand is nonnegative, so the truncated integral is a lower bound
    if np.isfinite(estimate):
        passed = estimate <= bound * (1.0 + 1e-6)
    else:
        passed = False
    return ContourCheck(estimate, bound, bool(passed), float(err), float(tail_est), (lo, hi),
                        converged)


# ---------------------------------------------------------------------------
# improving angles and the Carasso-Kato criteria


def improving_angles(mode, theta1=None, theta2=None, gamma=None, theta0=None, theta=None):
    """Holomorphy angle produced by the sector-improvement results.

    ``BHH0``: ``pi/2 (1 - (2 gamma/pi) theta1/theta2)`` for ``A`` sectorial of
    angle ``gamma``.  ``BHH``: ``pi/2 (1 - theta1/theta2)``.  ``BHHT``:
    ``theta0 + (pi/2 - theta0)(1 - theta1/theta2)`` when ``-A`` already
    generates a holomorphic semigroup of angle ``theta0``.  ``CK``:
    ``pi/2 (1 - pi/(2 theta))``.
    """
    mode = str(mode).upper()
    if mode == "CK":
        if theta is None or not (HALF_PI < theta < math.pi):
            raise DomainError("CK needs theta in (pi/2, pi)")
        return HALF_PI * (1.0 - math.pi / (2.0 * theta))
    if theta1 is None or theta2 is None:
        raise DomainError("%s needs theta1 and theta2" % mode)
    if not (0.0 < theta1 < math.pi):
        raise DomainError("theta1 must lie in (0, pi)")
    if not (HALF_PI < theta2 < math.pi):
        raise DomainError("theta2 must lie in (pi/2, pi)")
    ratio = theta1 / theta2
    if mode == "BHH0":
        if gamma is None or not (0.0 < gamma < min(theta2, math.pi * theta2 / (2.0 * theta1))):
            raise DomainError("BHH0 needs gamma in (0, min(theta2, pi theta2 / (2 theta1)))")
        return HALF_PI * (1.0 - (2.0 * gamma / math.pi) * ratio)
    if mode == "BHH":
        if not theta1 < theta2:
            raise DomainError("BHH needs theta1 < theta2")
        return HALF_PI * (1.0 - ratio)
    if mode == "BHHT":
        if not theta1 <= theta2:
            raise DomainError("BHHT needs theta1 <= theta2")
        if theta0 is None or not (0.0 < theta0 <= HALF_PI):
            raise DomainError("BHHT needs theta0 in (0, pi/2]")
        return theta0 + (HALF_PI - theta0) * (1.0 - ratio)
    raise DomainError("unknown mode %r" % (mode,))


@dataclass
class CKVerdict:
    """Sampled evidence for a Carasso-Kato sector condition (never a proof)."""

    criterion: str
    max_arg: float
    min_arg: float
    target: float
    samples: int
    passed: bool
    worst_lambda: complex
    params: dict = field(default_factory=dict)
    note: str = "sampling evidence only"

    def to_dict(self):
        return {"criterion": self.criterion, "max_arg": self.max_arg,
                "min_arg": self.min_arg, "target": self.target, "samples": self.samples,
                "pass": self.passed,
                "worst_lambda": [self.worst_lambda.real, self.worst_lambda.imag],
                "params": dict(self.params), "note": self.note}


def carasso_kato_check(psi, gamma=None, beta=0.0, theta=None, r=None, plan=None, tol=DEFAULT_TOL):
    """Sample a geometric Carasso-Kato condition.

    Without ``theta``: the shifted-sector condition ``psi(C+) + beta`` inside
    the closed sector of half-angle ``gamma`` (``beta = 0`` is the plain
    sector condition characterising complete Bernstein examples).  With
    ``theta`` and ``r``: ``0 <= arg psi(l) <= pi/2`` for ``0 <= arg l <= theta``,
    ``|l| >= r``, using the holomorphic extension beyond the half-plane.
    """
    plan = plan or SamplingPlan()
    if theta is None:
        if gamma is None or not (0.0 < gamma < HALF_PI):
            raise DomainError("gamma must lie in (0, pi/2)")
        if beta < 0:
            raise DomainError("shift beta must be nonnegative")
        radii = plan.radii()
        angles = plan.angles(-HALF_PI, HALF_PI)
        lam = radii[:, None] * np.exp(1j * angles)[None, :]
        arg = np.angle(psi(lam) + beta)
        k = np.unravel_index(int(np.argmax(np.abs(arg))), arg.shape)
        mx = float(np.max(np.abs(arg)))
        return CKVerdict("shifted-sector", mx, float(np.min(arg)), gamma, arg.size,
                         bool(mx <= gamma + tol), complex(lam[k]),
                         {"gamma": gamma, "beta": beta})
    if not (HALF_PI < theta < math.pi):
        raise DomainError("theta must lie in (pi/2, pi)")
    r = 1.0 if r is None else float(r)
    if r <= 0:
        raise DomainError("radius must be positive")
    radii = np.geomspace(r, r * plan.r_max / plan.r_min, plan.n_radii)
    angles = plan.angles(0.0, theta)
    lam = radii[:, None] * np.exp(1j * angles)[None, :]
    arg = np.angle(_eval_anywhere(psi, lam))
    excess = np.maximum(arg - HALF_PI, -arg)
    k = np.unravel_index(int(np.argmax(excess)), arg.shape)
    return CKVerdict("upper-sector", float(np.max(arg)), float(np.min(arg)), HALF_PI, arg.size,
                     bool(np.max(excess) <= tol), complex(lam[k]), {"theta": theta, "r": r})


def fujita_ratio_probe(psi, alpha, thetas, rs):
    """Rows ``(r, theta, ratio, |ratio - exp(i alpha theta)|)`` of
    ``psi(r e^{i theta}) / psi(r)``; diagnostic only."""
    rows = []
    for r in rs:
        base = complex(psi(float(r)))
        for th in thetas:
            lam = np.array([r * complex(math.cos(th), math.sin(th))])
            val = complex(_eval_anywhere(psi, lam)[0]) / base
            dev = abs(val - complex(math.cos(alpha * th), math.sin(alpha * th)))
            rows.append({"r": float(r), "theta": float(th), "re_ratio": val.real,
                         "im_ratio": val.imag, "deviation": dev})
    return rows
