"""Positive Radon measures on (0, inf) with quadrature and analytic tails.

A measure is a sum of three kinds of pieces:

* atoms ``(location, mass)``, integrated exactly;
* :class:`DensitySegment` pieces ``s**p * h(s) ds`` on a finite interval
  ``[lo, hi]`` (``lo`` may be 0, in which case a Gauss-Jacobi rule absorbs
  the algebraic singularity);
* :class:`GammaTail` pieces ``K s**q exp(-c s) ds`` on ``[start, inf)``,
  whose moments beyond any cut are known in closed form.

Integration against a vectorised kernel ``k(s) -> array (N, ...)`` is done
by :meth:`RadonMeasure.integrate` with log-radial Gauss-Legendre panels and
order doubling.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import math
from typing import Callable, Sequence, Tuple

import mpmath
import numpy as np

from . import quadrature as qd
from .errors import AdmissibilityError, ConvergenceError

#: phase change per Gauss-Legendre sub-panel used for oscillatory kernels
_PHASE_PER_PANEL = 2.5
#: exp(-x) below this is treated as zero when deciding on oscillation splits
_DECAY_CUT = 40.0
_MAX_SPLIT = 4000


def _const_one(s):
    return np.ones_like(s)


@dataclass(frozen=True)
class DensitySegment:
    """Density ``s**p * h(s)`` on the finite interval ``[lo, hi]``."""

    lo: float
    hi: float
    h: Callable = _const_one
    p: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi < math.inf):
            raise AdmissibilityError(
                "segment needs 0 <= lo < hi < inf, got [%r, %r]" % (self.lo, self.hi))
        if self.lo == 0.0 and self.p <= -2.0:
            raise AdmissibilityError("density s^%g is not integrable against s near 0" % self.p)

    def density(self, s):
        s = np.asarray(s, dtype=float)
        return s ** self.p * self.h(s)


@dataclass(frozen=True)
class GammaTail:
    """Density ``K s**q exp(-c s)`` on ``[start, inf)``.

    With ``c == 0`` the tail is a pure power law; ``q < 0`` is required
    here and Lévy admissibility additionally needs ``q < -1``.
    """

    start: float
    K: float
    q: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if self.K <= 0 or self.c < 0 or self.start < 0:
            raise AdmissibilityError("tail needs K > 0, c >= 0, start >= 0")
        if self.c == 0.0:
            if self.q >= 0.0:
                raise AdmissibilityError("power tail s^%g is too heavy" % self.q)
            if self.start <= 0.0:
                raise AdmissibilityError("power tail must start above 0")
        if self.start == 0.0 and self.q <= -2.0:
            raise AdmissibilityError("density s^%g is not integrable against s near 0" % self.q)

    def density(self, s):
        s = np.asarray(s, dtype=float)
        return self.K * s ** self.q * np.exp(-self.c * s)

    def moment_beyond(self, S, j=0):
        """``int_S^inf s**j`` against this tail (``S >= start``)."""
        a = self.q + j + 1.0
        if self.c == 0.0:
            if a >= 0:
                return math.inf
            return self.K * S ** a / (-a)
        if S == 0.0:
            if a <= 0:
                return math.inf
            return self.K * math.gamma(a) * self.c ** (-a)
        return self.K * float(mpmath.gammainc(a, self.c * S)) * self.c ** (-a)


@lru_cache(maxsize=4096)
def _tail_cut(tail, growth, thresh):
    """Smallest (geometric) S with tail moment of order ``growth`` below ``thresh``."""
    S = max(tail.start, 1.0 / tail.c, 1e-300)
    for _ in range(400):
        if tail.moment_beyond(S, growth) <= thresh:
            return S
        S *= 1.25
    return S


@dataclass(frozen=True)
class Far:
    """Large-s behaviour ``k(s) ~ k_inf + k_m1 / s + k_m2 / s**2`` for ``s >= S``.

    Used to close power-law tails analytically beyond ``S``.
    """

    S: float
    k_inf: object = 0.0
    k_m1: object = 0.0
    k_m2: object = 0.0


def _vanish_split(p, vanish):
    """Exponent shift m so that the Jacobi weight s**(p+m) is integrable."""
    m = 0
    while p + m <= -1.0:
        m += 1
    if m > vanish:
        raise AdmissibilityError(
            "kernel vanishing to order %d cannot absorb density s^%g at 0" % (vanish, p))
    return m


@dataclass(frozen=True)
class RadonMeasure:
    """Atoms plus density segments plus analytic tails."""

    atoms: Tuple[Tuple[float, float], ...] = ()
    segments: Tuple[DensitySegment, ...] = ()
    tails: Tuple[GammaTail, ...] = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        atoms = tuple((float(x), float(w)) for x, w in self.atoms)
        for x, w in atoms:
            if not (x > 0 and w > 0 and math.isfinite(x) and math.isfinite(w)):
                raise AdmissibilityError("atom (%r, %r) must have positive location and mass" % (x, w))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "tails", tuple(self.tails))
        spans = sorted([(g.lo, g.hi) for g in self.segments]
                       + [(t.start, math.inf) for t in self.tails])
        for (a0, b0), (a1, b1) in zip(spans, spans[1:]):
            if a1 < b0:
                raise AdmissibilityError("segment intervals overlap near s=%g" % a1)

    # -- construction helpers -------------------------------------------
    @classmethod
    def empty(cls):
        return cls()

    @classmethod
    def dirac(cls, x, mass=1.0):
        return cls(atoms=((x, mass),))

    @classmethod
    def power_exp(cls, lo, hi, K, q, c=0.0):
        """``K s**q exp(-c s)`` on ``[lo, hi]`` (``hi=None`` for infinity).

        Splits at 1 when the piece touches both 0 and infinity so that the
        origin gets a Jacobi rule and the far part a closed-form tail.
        """
        lo = float(lo)
        h = _expfactor(K, c)
        if hi is not None and math.isfinite(hi):
            return cls(segments=(DensitySegment(lo, float(hi), h, q),))
        if lo > 0:
            return cls(tails=(GammaTail(lo, K, q, c),))
        if q > -1.0 and c > 0:
            return cls(tails=(GammaTail(0.0, K, q, c),))
        return cls(segments=(DensitySegment(0.0, 1.0, h, q),), tails=(GammaTail(1.0, K, q, c),))

    def __add__(self, other):
        return RadonMeasure(self.atoms + other.atoms, self.segments + other.segments,
                            self.tails + other.tails, self.label or other.label)

    def scaled(self, factor):
        """The measure multiplied by ``factor > 0``."""
        f = float(factor)
        segs = tuple(DensitySegment(g.lo, g.hi, _scaled_h(g.h, f), g.p) for g in self.segments)
        tails = tuple(GammaTail(t.start, t.K * f, t.q, t.c) for t in self.tails)
        return RadonMeasure(tuple((x, w * f) for x, w in self.atoms), segs, tails, self.label)

    def restrict(self, lo, hi):
        """The measure restricted to ``(lo, hi]``."""
        atoms = tuple((x, w) for x, w in self.atoms if lo < x <= hi)
        segs = []
        for g in self.segments:
            a, b = max(g.lo, lo), min(g.hi, hi)
            if a < b:
                segs.append(DensitySegment(a, b, g.h, g.p))
        tails = []
        for t in self.tails:
            a = max(t.start, lo)
            if math.isinf(hi):
                tails.append(GammaTail(a, t.K, t.q, t.c))
            elif a < hi:
                segs.append(DensitySegment(a, hi, _expfactor(t.K, t.c), t.q))
        return RadonMeasure(atoms, tuple(segs), tuple(tails), self.label)

    # -- queries ---------------------------------------------------------
    @property
    def is_zero(self):
        return not (self.atoms or self.segments or self.tails)

    @property
    def compact_support(self):
        return not self.tails

    @property
    def support_max(self):
        pts = [x for x, _ in self.atoms] + [g.hi for g in self.segments]
        if self.tails:
            return math.inf
        return max(pts) if pts else 0.0

    def levy_mass(self):
        """``int s/(1+s)``; finite for every admissible Lévy measure."""
        for t in self.tails:
            if t.c == 0 and t.q >= -1.0:
                raise AdmissibilityError("Lévy tail s^%g has infinite mass" % t.q)
        val = self.integrate(lambda s: s / (1.0 + s), far=Far(1e8, 1.0, -1.0), vanish=1)
        return float(np.real(val))

    def stieltjes_mass(self):
        """``int 1/(1+s)``; finite for every admissible Stieltjes measure."""
        for g in self.segments:
            if g.lo == 0 and g.p <= -1.0:
                raise AdmissibilityError("Stieltjes density s^%g not integrable at 0" % g.p)
        for t in self.tails:
            if t.c == 0 and t.q >= 0.0:
                raise AdmissibilityError("Stieltjes tail s^%g too heavy" % t.q)
        val = self.integrate(lambda s: 1.0 / (1.0 + s), far=Far(1e8, 0.0, 1.0), vanish=0)
        return float(np.real(val))

    # -- integration -----------------------------------------------------
    def _rule(self, n, rates, growth, far, vanish, thresh, scale, poles=None):
        """Collect quadrature nodes and weights for every continuous piece."""
        fmax = 0.0
        if rates is not None and np.size(rates):
            fmax = float(np.max(np.abs(rates)))
        fmax = max(fmax, scale)
        if poles is not None and len(poles):
            # keep the origin panel well clear of near-axis poles
            fmax = max(fmax, 2.0 / float(np.min(np.asarray(poles)[:, 0])))
        nodes, weights = [], []
        remainder = []

        def log_part(a, b, dens):
            if b <= a:
                return
            br = qd.log_breaks(a, b)
            if poles is not None:
                br = _grade(br, poles)
            br = self._split(br, rates)
            s, w = qd.log_panel_rule(br, n)
            nodes.append(s)
            weights.append(w * dens(s))

        for g in self.segments:
            lo = g.lo
            if lo == 0.0:
                m = _vanish_split(g.p, vanish)
                delta = min(g.hi, 1.0 / fmax if fmax > 1.0 else 1.0)
                e = g.p + m
                x, W = qd.gauss_jacobi_origin(n, e)
                s = delta * x
                nodes.append(s)
                weights.append(delta ** (e + 1.0) * W * g.h(s) / s ** m)
                lo = delta
            log_part(lo, g.hi, g.density)

        for t in self.tails:
            lo = t.start
            if lo == 0.0:
                m = _vanish_split(t.q, vanish)
                delta = 1.0 / fmax if fmax > 1.0 else 1.0
                if t.c > 0:
                    delta = min(delta, 1.0 / t.c)
                e = t.q + m
                x, W = qd.gauss_jacobi_origin(n, e)
                s = delta * x
                nodes.append(s)
                weights.append(delta ** (e + 1.0) * W * t.K * np.exp(-t.c * s) / s ** m)
                lo = delta
            if t.c == 0.0:
                if far is None:
                    raise ConvergenceError("power-law tail needs far-field kernel data", math.inf)
                S = max(lo, far.S)
                remainder.append((t, S))
            else:
                S = max(lo, _tail_cut(t, int(growth), thresh))
                if far is not None and S >= far.S:
                    remainder.append((t, S))
            log_part(lo, S, t.density)
        if nodes:
            return np.concatenate(nodes), np.concatenate(weights), remainder
        return np.zeros(0), np.zeros(0), remainder

    @staticmethod
    def _split(breaks, rates):
        """Subdivide log panels where ``exp(-w s)`` oscillates quickly."""
        if rates is None or not np.size(rates):
            return breaks
        r = np.ravel(np.asarray(rates))
        a = np.exp(breaks[:-1])
        b = np.exp(breaks[1:])
        live = (r.real[None, :] * a[:, None]) < _DECAY_CUT
        f = np.max(np.where(live, np.abs(r)[None, :], 0.0), axis=1)
        m = np.clip(np.ceil(f * (b - a) / _PHASE_PER_PANEL), 1, _MAX_SPLIT).astype(int)
        if np.all(m == 1):
            return breaks
        out = [breaks[:1]]
        for i, k in enumerate(m):
            out.append(np.linspace(breaks[i], breaks[i + 1], k + 1)[1:])
        return np.concatenate(out)

    def integrate(self, kernel, rates=None, growth=0, far=None, vanish=1,
                  tol=qd.DEFAULT_TOL, order=qd.DEFAULT_ORDER, max_doublings=2,
                  strict=False, return_error=False, scale=0.0, poles=None):
        """``int kernel(s) mu(ds)``.

        ``kernel`` maps a 1-d array of nodes to an array whose first axis
        runs over the nodes.  ``rates`` lists the complex ``w`` of any
        ``exp(-w s)`` factor (drives sub-panelling); ``growth`` bounds the
        kernel by ``s**growth`` at infinity (drives exponential-tail cuts);
        ``far`` gives the asymptotics used to close power-law tails;
        ``vanish`` is the order to which the kernel vanishes at 0; ``scale``
        is the inverse of the smallest length on which the kernel varies;
        ``poles`` is an optional ``(position, width)`` array of nearby kernel
        singularities around which panels are graded geometrically.
        """
        thresh = 1e-17
        acc = None
        if self.atoms:
            x = np.array([a for a, _ in self.atoms])
            w = np.array([b for _, b in self.atoms])
            acc = np.tensordot(w, kernel(x), axes=(0, 0))

        if not (self.segments or self.tails):
            val = acc if acc is not None else 0.0
            return (val, 0.0) if return_error else val

        rem_terms = None

        def estimate(n):
            nonlocal rem_terms
            s, w, rem = self._rule(n, rates, growth, far, vanish, thresh, scale, poles)
            rem_terms = rem
            if s.size == 0:
                return 0.0
            return np.tensordot(w, kernel(s), axes=(0, 0))

        val, err = qd.doubling(estimate, order=order, tol=tol,
                               max_doublings=max_doublings, strict=strict)
        for t, S in rem_terms or ():
            for coef, j in ((far.k_inf, 0), (far.k_m1, -1), (far.k_m2, -2)):
                if np.any(np.asarray(coef) != 0):
                    val = val + coef * t.moment_beyond(S, j)
        if acc is not None:
            val = val + acc
        return (val, err) if return_error else val

    # -- Laplace-type integrals -----------------------------------------
    def laplace_moment(self, w, k, tol=qd.DEFAULT_TOL):
        """``int s**k exp(-w s) mu(ds)`` for ``Re w >= 0``; exact on tails."""
        w = np.asarray(w, dtype=complex)
        flat = w.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        if self.atoms:
            x = np.array([a for a, _ in self.atoms])
            m = np.array([b for _, b in self.atoms])
            out += np.exp(-np.outer(flat, x)) @ (m * x ** k)
        cont = RadonMeasure(segments=self.segments)
        if self.segments:
            out += cont.integrate(lambda s: s[:, None] ** k * np.exp(-s[:, None] * flat[None, :]),
                                  rates=flat, vanish=k, tol=tol)
        for t in self.tails:
            out += _tail_laplace(t, flat, k)
        return out.reshape(w.shape)

    def lk(self, w, tol=qd.DEFAULT_TOL):
        """``int (1 - exp(-w s)) mu(ds)`` for ``Re w >= 0``."""
        w = np.asarray(w, dtype=complex)
        flat = w.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        if self.atoms:
            x = np.array([a for a, _ in self.atoms])
            m = np.array([b for _, b in self.atoms])
            out += -np.expm1(-np.outer(flat, x)) @ m
        if self.segments:
            cont = RadonMeasure(segments=self.segments)
            out += cont.integrate(lambda s: -np.expm1(-s[:, None] * flat[None, :]),
                                  rates=flat, vanish=1, tol=tol)
        for t in self.tails:
            out += _tail_lk(t, flat)
        return out.reshape(w.shape)


def _grade(breaks, poles):
    """Insert log-breakpoints graded towards near-real kernel poles."""
    extra = []
    ulo, uhi = breaks[0], breaks[-1]
    for pos, width in np.asarray(poles, dtype=float).reshape(-1, 2):
        if pos <= 0 or width <= 0:
            continue
        u0 = math.log(pos)
        if u0 + qd.LN2 < ulo or u0 - qd.LN2 > uhi:
            continue
        d = min(width / pos, qd.LN2)
        while d < qd.LN2:
            extra.extend((u0 - d, u0 + d))
            d *= 2.0
        extra.append(u0)
    if not extra:
        return breaks
    pts = np.concatenate([breaks, np.clip(extra, ulo, uhi)])
    return np.unique(pts)


def _expfactor(K, c):
    K = float(K)
    c = float(c)
    if c == 0.0:
        return lambda s: np.full_like(np.asarray(s, dtype=float), K)
    return lambda s: K * np.exp(-c * np.asarray(s, dtype=float))


def _scaled_h(h, f):
    return lambda s: f * h(s)


def _gamma_upper(a, x):
    """``Gamma(a, x)`` for real ``a`` and complex ``x`` (principal branch)."""
    return complex(mpmath.gammainc(a, x))


def _tail_laplace(t, w, k):
    """``int_start^inf s**k exp(-w s) K s**q exp(-c s) ds`` in closed form."""
    a = t.q + k + 1.0
    x = t.c + w
    if t.start == 0.0:
        if a <= 0:
            raise AdmissibilityError("Laplace moment diverges at the origin")
        return t.K * math.gamma(a) * x ** (-a)
    out = np.empty(w.shape, dtype=complex)
    for i, xi in enumerate(x):
        if xi == 0:
            out[i] = t.K * t.start ** a / (-a) if a < 0 else math.inf
        else:
            out[i] = t.K * xi ** (-a) * _gamma_upper(a, xi * t.start)
    return out


def _tail_lk(t, w):
    """``int (1 - exp(-w s))`` against a tail, free of cancellation for small w."""
    a = t.q + 1.0
    if t.start == 0.0:
        if a <= 0:
            raise AdmissibilityError("Lévy tail from 0 needs q > -1 for the closed form")
        # K Gamma(a) (c^-a - (c+w)^-a) = -K Gamma(a) c^-a expm1(-a log1p(w/c))
        return -t.K * math.gamma(a) * t.c ** (-a) * np.expm1(-a * np.log1p(w / t.c))
    base = t.moment_beyond(t.start, 0)
    return base - _tail_laplace(t, w, 0)


def as_measure(atoms=(), segments: Sequence = (), tails: Sequence = ()):
    """Convenience constructor accepting lists."""
    return RadonMeasure(tuple(atoms), tuple(segments), tuple(tails))


EMPTY = RadonMeasure()
