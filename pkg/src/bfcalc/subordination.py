"""Closed-form subordinator families and subordinated matrix semigroups.

A family maps ``t >= 0`` to a subprobability measure ``mu_t`` on
``[0, inf)`` whose Laplace transform is ``exp(-t psi)``.  Here ``mu_t`` is
stored as an atom at the origin plus a :class:`RadonMeasure` on
``(0, inf)``, so the measure quadrature of :mod:`bfcalc.measures` serves
Laplace transforms, masses and the Bochner integral
``int exp(-sA) mu_t(ds)`` alike.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm
from scipy.special import digamma, gammaln

from .bernstein import Affine, Compose, Log1p, OneMinusExp, Power
from .errors import ConvergenceError, DomainError, SpecError
from .geometry import CheckReport
from .measures import DensitySegment, Far, GammaTail, RadonMeasure
from .sectorial import ensure_sectorial

#: exp(-x) below this counts as zero when trimming supports
_CUT = 40.0
_POISSON_EPS = 1e-18
_ACCEPT = 1e-7


def _t_check(t, allow_zero=False):
    t = float(t)
    if not (t > 0 or (allow_zero and t == 0)) or not math.isfinite(t):
        raise DomainError("t must be %s" % ("nonnegative" if allow_zero else "positive"))
    return t


class SubordinatorFamily:
    """``t -> mu_t`` with Laplace transform ``exp(-t psi)``."""

    name = "family"
    conservative = True

    def psi(self):
        raise NotImplementedError

    def measure(self, t):
        """``(m0, mu)``: mass of the atom at 0 and the rest as a measure."""
        raise NotImplementedError

    def density(self, t, s):
        raise DomainError("%s has no density" % self.name)

    def density_dt(self, t, s):
        raise DomainError("%s has no density" % self.name)

    def spec(self):
        return {"family": self.name}

    # generic operations ------------------------------------------------
    def laplace(self, t, z, tol=1e-12):
        """``int exp(-z s) mu_t(ds)`` by quadrature (exact on atoms and tails)."""
        t = _t_check(t, allow_zero=True)
        z = np.asarray(z, dtype=complex)
        if np.any(z.real < -1e-14):
            raise DomainError("Laplace transform needs Re z >= 0")
        if t == 0:
            return np.ones(z.shape, dtype=complex) if z.ndim else 1.0 + 0j
        m0, mu = self.measure(t)
        val = m0 + (mu.laplace_moment(z, 0, tol=tol) if not mu.is_zero else 0.0)
        return val + self._tail_correction(t, z)

    def _tail_correction(self, t, z):
        """Laplace transform of ``mu_t`` minus that of :meth:`measure` (tails)."""
        return 0.0

    def exact_laplace(self, t, z):
        return np.exp(-t * self.psi()(np.asarray(z, dtype=complex)))

    def mass(self, t):
        t = _t_check(t, allow_zero=True)
        if t == 0:
            return 1.0
        m0, mu = self.measure(t)
        if mu.is_zero:
            return m0
        far = Far(max(mu.support_max if math.isfinite(mu.support_max) else 1.0, 1.0), 1.0)
        val = mu.integrate(lambda s: np.ones_like(s), vanish=0, far=far)
        corr = self._tail_correction(t, np.zeros(1, dtype=complex))
        return float(m0 + np.real(val) + np.real(np.ravel(corr)[0] if np.ndim(corr) else corr))

    def log_variation_density(self, t, v):
        """``|d/dt density|(e^v) e^v``, the integrand of the total variation in ``v = log s``."""
        raise DomainError("%s has no density" % self.name)

    def variation_range(self, t):
        """``v`` interval carrying the total variation and its interior break points."""
        raise DomainError("%s has no density" % self.name)


class GammaFamily(SubordinatorFamily):
    """``mu_t(ds) = s^(t-1) exp(-s) / Gamma(t) ds``; ``psi = log(1+z)``."""

    name = "gamma"

    def psi(self):
        return Log1p()

    def measure(self, t):
        # quadrature on [0, S] with the closed-form tail beyond
        lg = float(gammaln(t))
        S = max(4.0 * t, 30.0)
        h = lambda s, lg=lg: np.exp(-s - lg)
        seg = DensitySegment(0.0, S, h, t - 1.0)
        tail = GammaTail(S, math.exp(-lg), t - 1.0, 1.0)
        return 0.0, RadonMeasure(segments=(seg,), tails=(tail,))

    def density(self, t, s):
        t = _t_check(t)
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return np.exp((t - 1.0) * np.log(s) - s - gammaln(t))

    def density_dt(self, t, s):
        s = np.asarray(s, dtype=float)
        return self.density(t, s) * (np.log(s) - digamma(t))

    def log_variation_density(self, t, v):
        v = np.asarray(v, dtype=float)
        return np.exp(t * v - np.exp(v) - gammaln(t)) * np.abs(v - digamma(t))

    def variation_range(self, t):
        k = float(digamma(t))
        return k - _CUT / t - 10.0, math.log(2.0 * _CUT), (k,)


class StableHalfFamily(SubordinatorFamily):
    """``mu_t(ds) = t / (2 sqrt(pi)) s^(-3/2) exp(-t^2 / (4 s)) ds``; ``psi = sqrt(z)``."""

    name = "stable_half"

    def psi(self):
        return Power(0.5)

    _SERIES = 12

    def _cut(self, t):
        return 100.0 * max(1.0, t * t)

    def measure(self, t, cut=None):
        """Quadrature segment up to ``S`` and the leading ``K s^-3/2`` tail
        beyond; :meth:`_tail_correction` adds the rest of the expansion of
        ``exp(-t^2/4s)`` on the tail in closed form."""
        K = t / (2.0 * math.sqrt(math.pi))
        lo = t * t / (4.0 * _CUT)
        S = cut or self._cut(t)
        h = lambda s, t=t, K=K: K * np.exp(-t * t / (4.0 * s))
        seg = DensitySegment(lo, S, h, -1.5)
        tail = GammaTail(S, K, -1.5, 0.0)
        return 0.0, RadonMeasure(segments=(seg,), tails=(tail,))

    def _tail_correction(self, t, z):
        from .measures import _tail_laplace

        K = t / (2.0 * math.sqrt(math.pi))
        S = self._cut(t)
        x = t * t / 4.0
        flat = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        out = np.zeros(flat.shape, dtype=complex)
        coef = K
        for j in range(1, self._SERIES + 1):
            coef *= -x / j
            out += coef * _tail_laplace(GammaTail(S, 1.0, -1.5 - j, 0.0), flat, 0)
        return out.reshape(np.shape(z)) if np.ndim(z) else complex(out[0])

    def log_variation_density(self, t, v):
        v = np.asarray(v, dtype=float)
        return (t / (2.0 * math.sqrt(math.pi)) * np.exp(-0.5 * v - 0.25 * t * t * np.exp(-v))
                * np.abs(1.0 / t - 0.5 * t * np.exp(-v)))

    def variation_range(self, t):
        k = math.log(0.5 * t * t)
        return math.log(t * t / (4.0 * _CUT)) - 3.0, k + 2.0 * _CUT + 10.0, (k,)

    def density(self, t, s):
        t = _t_check(t)
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = t / (2.0 * math.sqrt(math.pi)) * s ** -1.5 * np.exp(-t * t / (4.0 * s))
        return np.where(s > 0, out, 0.0)

    def density_dt(self, t, s):
        s = np.asarray(s, dtype=float)
        return self.density(t, s) * (1.0 / t - t / (2.0 * s))



class PoissonFamily(SubordinatorFamily):
    """``mu_t = sum_k exp(-ct) (ct)^k / k! delta_k``; ``psi = c (1 - exp(-z))``."""

    name = "poisson"

    def __init__(self, c=1.0):
        c = float(c)
        if not c > 0:
            raise SpecError("poisson needs c > 0")
        self.c = c

    def psi(self):
        return OneMinusExp(self.c, 1.0)

    def atoms(self, t):
        t = _t_check(t, allow_zero=True)
        lam = self.c * t
        if lam == 0:
            return [(0, 1.0)]
        kmax = int(lam + 12.0 * math.sqrt(lam) + 40.0)
        k = np.arange(kmax + 1)
        logp = -lam + k * math.log(lam) - gammaln(k + 1.0)
        p = np.exp(logp)
        keep = p > _POISSON_EPS
        keep[0] = True
        return [(int(i), float(v)) for i, v in zip(k[keep], p[keep])]

    def measure(self, t):
        at = self.atoms(t)
        m0 = at[0][1]
        rest = tuple((float(k), w) for k, w in at[1:] if w > 0)
        return m0, RadonMeasure(atoms=rest)

    def density(self, t, s=None):
        return self.atoms(t)

    def mass_derivatives(self, t):
        """``d/dt`` of the atom masses: ``c (p_(k-1) - p_k)``."""
        at = dict(self.atoms(t))
        kmax = max(at) + 1
        return [(k, self.c * (at.get(k - 1, 0.0) - at.get(k, 0.0))) for k in range(kmax + 1)]

    def spec(self):
        return {"family": "poisson", "c": self.c}


class IdentityTime(SubordinatorFamily):
    """``mu_t = delta_t``; ``psi(z) = z``."""

    name = "identity"

    def psi(self):
        return Affine(0.0, 1.0)

    def measure(self, t):
        return 0.0, RadonMeasure.dirac(t)


class ComposedFamily(SubordinatorFamily):
    """``eta_t(dtau) = int nu_s(dtau) mu_t(ds)``: ``outer`` gives ``mu_t``,
    ``inner`` gives ``nu_s``; the exponent is ``outer.psi o inner.psi``."""

    name = "composed"

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner

    def psi(self):
        return Compose(self.outer.psi(), self.inner.psi())

    def measure(self, t):
        raise DomainError("composed families are numeric only; use laplace/density")

    def laplace(self, t, z, tol=1e-10):
        """Double quadrature: outer integral over ``s`` of the inner Laplace transform."""
        t = _t_check(t, allow_zero=True)
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if isinstance(self.inner, IdentityTime):
            return self.outer.laplace(t, z)
        if t == 0:
            return np.ones(z.shape, dtype=complex)
        m0, mu = self.outer.measure(t)

        def kernel(s):
            return np.array([self.inner.laplace(float(sj), z) for sj in s])

        far = Far(1e300, 0.0)
        val, err = mu.integrate(kernel, far=far, vanish=0, tol=tol, return_error=True)
        if err > 1e-6:
            raise ConvergenceError("composed Laplace quadrature reached %.3e" % err, err)
        return m0 + val

    def density(self, t, tau, tol=1e-10):
        """Density of the continuous part of ``eta_t`` on the ``tau`` grid
        (an atom ``m0`` at 0 is returned separately by :meth:`atom_at_zero`)."""
        t = _t_check(t)
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        if isinstance(self.inner, IdentityTime):
            return self.outer.density(t, tau)
        if isinstance(self.inner, PoissonFamily):
            raise DomainError("inner family must have a density")
        m0, mu = self.outer.measure(t)
        kernel = lambda s: np.array([self.inner.density(float(sj), tau) for sj in s])
        val, err = mu.integrate(kernel, far=Far(1e300, 0.0), vanish=0, tol=tol,
                                return_error=True)
        return np.real(val)

    def atom_at_zero(self, t):
        return self.outer.measure(t)[0]

    def spec(self):
        return {"family": "composed", "outer": self.outer.spec(), "inner": self.inner.spec()}


def family_from_spec(d):
    if not isinstance(d, dict) or "family" not in d:
        raise SpecError("family spec must be an object with a 'family'")
    f = d["family"]
    if f == "gamma":
        return GammaFamily()
    if f == "stable_half":
        return StableHalfFamily()
    if f == "poisson":
        c = d.get("c", 1.0)
        if not isinstance(c, (int, float)) or isinstance(c, bool):
            raise SpecError("poisson 'c' must be a number")
        return PoissonFamily(c)
    if f == "identity":
        return IdentityTime()
    if f == "composed":
        return ComposedFamily(family_from_spec(d.get("outer")), family_from_spec(d.get("inner")))
    raise SpecError("unknown family %r" % (f,))


# -- operations ----------------------------------------------------------------


def density(family, t, s):
    """Pointwise density (atom list ``[(k, mass)]`` for Poisson)."""
    _t_check(t)
    if isinstance(family, PoissonFamily):
        return family.atoms(t)
    return family.density(t, s)


def subordinate_matrix(family, A, t, tol=1e-11):
    """``exp(-t psi(A)) = int exp(-sA) mu_t(ds)`` by quadrature."""
    S = ensure_sectorial(A)
    t = _t_check(t, allow_zero=True)
    n = S.n
    eye = np.eye(n, dtype=complex)
    if t == 0:
        return eye
    if isinstance(family, ComposedFamily):
        raise DomainError("subordinate_matrix takes a closed-form family")
    re_min = float(np.min(S.eigenvalues.real))
    if re_min < 0:
        raise DomainError("exp(-sA) is unbounded: spectrum leaves the right half-plane")
    if isinstance(family, StableHalfFamily) and re_min > 0:
        # beyond S exp(-sA) is negligible, so the tail expansion is not needed
        m0, mu = family.measure(t, cut=max(family._cut(t), _CUT / re_min))
    else:
        m0, mu = family.measure(t)
    out = m0 * eye
    if mu.is_zero:
        return out
    if isinstance(family, PoissonFamily):
        # integer atoms: powers of exp(-A)
        E = expm(-S.A)
        P = eye.copy()
        k_prev = 0
        for k, w in mu.atoms:
            P = P @ np.linalg.matrix_power(E, int(k) - k_prev)
            k_prev = int(k)
            out = out + w * P
        return out
    heavy = any(tl.c == 0.0 for tl in mu.tails)
    if heavy and re_min <= 0:
        raise ConvergenceError("heavy-tailed family needs spectrum in Re > 0", math.inf)
    far = Far(max(_CUT / re_min, 1.0), 0.0) if re_min > 0 else None
    val, err = mu.integrate(S.expm_neg, rates=S.eigenvalues, far=far, vanish=0, tol=tol,
                            return_error=True, scale=float(np.max(np.abs(S.eigenvalues))))
    if err > _ACCEPT * max(1.0, float(np.linalg.norm(val, 2))):
        raise ConvergenceError("Bochner integral reached only %.3e" % err, err)
    norms = np.linalg.norm(S.expm_neg(np.geomspace(1e-3, 1e3, 13)), 2, axis=(1, 2))
    if np.max(norms) > 1e8:
        raise DomainError("exp(-sA) is not bounded over the quadrature range")
    return out + val


def semigroup_property_check(family, t, s, zs, tol=None):
    """``max |mu^_t(z) mu^_s(z) - mu^_(t+s)(z)|`` over ``zs`` with
    all transforms by quadrature."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    a = family.laplace(t, zs)
    b = family.laplace(s, zs)
    c = family.laplace(t + s, zs)
    dev = np.abs(a * b - c)
    i = int(np.argmax(dev))
    worst = float(dev[i])
    if tol is None:
        tol = 1e-12 if isinstance(family, PoissonFamily) else 1e-8
    return CheckReport("SEMIGROUP", int(zs.size), -worst, None, complex(zs[i]),
                       bool(worst <= tol), tol, params={"t": t, "s": s})


def laplace_consistency(family, ts, zs):
    """``max |mu^_t(z) - exp(-t psi(z))|`` over the grid."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    worst = 0.0
    for t in ts:
        worst = max(worst, float(np.max(np.abs(family.laplace(t, zs) - family.exact_laplace(t, zs)))))
    return worst


@dataclass
class T1Table:
    rows: list
    bounded: bool
    note: str

    def to_dict(self):
        return {"rows": [{"t": t, "t_norm": v} for t, v in self.rows],
                "bounded": self.bounded, "note": self.note}


def derivative_norm(family, t, tol=1e-10):
    """``||d/dt mu_t||`` as the total variation of the time derivative."""
    t = _t_check(t)
    if isinstance(family, PoissonFamily):
        return float(sum(abs(v) for _, v in family.mass_derivatives(t)))
    if isinstance(family, (ComposedFamily, IdentityTime)):
        raise DomainError("derivative norm needs a family with a density")
    lo, hi, breaks = family.variation_range(t)
    pts = [lo] + [b for b in breaks if lo < b < hi] + [hi]
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        # a fixed number of pieces keeps quad's local error estimates honest
        edges = np.linspace(a, b, 41)
        for x0, x1 in zip(edges, edges[1:]):
            val, _ = quad(lambda v: float(family.log_variation_density(t, v)), x0, x1,
                          epsabs=tol * 1e-3, epsrel=tol, limit=100)
            total += val
    return total


def t1_diagnostic(family, k=10):
    """``t ||mu_t'||`` for ``t = 1, 1/2, ..., 2^-k``.

    Boundedness of the column is evidence for the T_1 property; it cannot
    tell a bounded exponent from a genuinely improving one.
    """
    rows = []
    for j in range(k + 1):
        t = 2.0 ** -j
        rows.append((t, t * derivative_norm(family, t)))
    vals = np.array([v for _, v in rows])
    tail = vals[len(vals) // 2:]
    bounded = bool(np.all(np.isfinite(vals)) and np.max(tail) <= 2.0 * max(np.max(vals[: len(vals) // 2 + 1]), 1e-300))
    note = "one-directional evidence: boundedness does not imply holomorphic improvement"
    if isinstance(family, PoissonFamily):
        note += "; psi is bounded, so the subordinated semigroup is not improving"
    return T1Table(rows, bounded, note)


def compose_subordinator(outer, inner, t, taus, zs=(1.0,)):
    """Density table of ``eta_t`` on ``taus`` plus a Laplace check at ``zs``.

    Returns ``(rows, atom0, laplace_rows)`` where ``rows`` are ``(tau, density)``
    and ``laplace_rows`` are ``(z, quadrature, exact)``.
    """
    fam = ComposedFamily(outer, inner)
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if isinstance(inner, IdentityTime):
        if isinstance(outer, PoissonFamily):
            dens = np.zeros_like(taus)
        else:
            dens = outer.density(t, taus)
    else:
        dens = fam.density(t, taus)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    quad = fam.laplace(t, zs)
    exact = fam.exact_laplace(t, zs)
    atom0 = fam.atom_at_zero(t) if not isinstance(inner, IdentityTime) else outer.measure(t)[0]
    rows = [(float(x), float(v)) for x, v in zip(taus, dens)]
    lrows = [(complex(z), complex(q), complex(e)) for z, q, e in zip(zs, quad, exact)]
    return rows, atom0, lrows
