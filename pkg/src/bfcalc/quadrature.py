"""Quadrature building blocks: Gauss rules, panel layouts, node doubling."""

from functools import lru_cache
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .errors import ConvergenceError

LN2 = math.log(2.0)
DEFAULT_TOL = 1e-10
DEFAULT_ORDER = 12
#: panel differences below this multiple of the integral of |f| are rounding noise
_ROUNDOFF = 1e-14


@lru_cache(maxsize=64)
def gauss_legendre(n):
    """Nodes and weights on [-1, 1]."""
    x, w = leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=256)
def gauss_jacobi_origin(n, e):
    """Rule for ``int_0^1 g(s) s**e ds`` with ``e > -1``."""
    if e <= -1.0:
        raise ValueError("Jacobi exponent must exceed -1, got %r" % e)
    x, w = roots_jacobi(n, 0.0, e)
    s = 0.5 * (1.0 + x)
    w = w * 2.0 ** (-e - 1.0)
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


def log_breaks(lo, hi, width=LN2):
    """Equal breakpoints in ``u = log s`` covering ``[lo, hi]``."""
    ulo, uhi = math.log(lo), math.log(hi)
    k = max(1, int(math.ceil((uhi - ulo) / width - 1e-12)))
    return np.linspace(ulo, uhi, k + 1)


def log_panel_rule(breaks, n):
    """Gauss-Legendre in ``u`` on each panel; returns s-nodes and ds-weights."""
    x, w = gauss_legendre(n)
    a = breaks[:-1]
    b = breaks[1:]
    half = 0.5 * (b - a)
    u = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    s = np.exp(u)
    wt = half[:, None] * w[None, :] * s
    return s.ravel(), wt.ravel()


def linear_panel_rule(a, b, m, n):
    """``m`` equal sub-panels of ``[a, b]`` in s with ``n`` points each."""
    x, w = gauss_legendre(n)
    edges = np.linspace(a, b, m + 1)
    lo = edges[:-1]
    half = 0.5 * (edges[1:] - lo)
    s = (lo + half)[:, None] + half[:, None] * x[None, :]
    wt = np.broadcast_to(half[:, None] * w[None, :], s.shape)
    return s.ravel(), np.array(wt).ravel()


def line_rule(a, b, n, width):
    """Composite Gauss-Legendre on ``[a, b]`` with panels of at most ``width``."""
    k = max(1, int(math.ceil((b - a) / width - 1e-12)))
    x, w = gauss_legendre(n)
    edges = np.linspace(a, b, k + 1)
    half = 0.5 * np.diff(edges)
    t = (edges[:-1] + half)[:, None] + half[:, None] * x[None, :]
    wt = half[:, None] * w[None, :]
    return t.ravel(), wt.ravel()


def _size(v):
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def doubling(estimate, order=DEFAULT_ORDER, tol=DEFAULT_TOL, max_doublings=3,
             rel=True, strict=False):
    """Evaluate ``estimate(n)`` at n, 2n, 4n, ... until two agree.

    Agreement is ``|v_2n - v_n| <= tol * max(1, |v_2n|)`` (or absolute if
    ``rel`` is false).  Returns ``(value, error_estimate)``; with ``strict``
    a non-converged result raises :class:`ConvergenceError`.
    """
    prev = estimate(order)
    err = math.inf
    for k in range(1, max_doublings + 1):
        cur = estimate(order * 2 ** k)
        err = _size(np.asarray(cur) - np.asarray(prev))
        scale = max(1.0, _size(cur)) if rel else 1.0
        if err <= tol * scale:
            return cur, err
        prev = cur
    if strict:
        raise ConvergenceError("node doubling stalled at error %.3e" % err, err)
    return prev, err


def extent(absfun, start, step, thresh, limit):
    """Walk from ``start`` in steps of ``step`` until ``absfun(u) <= thresh``
    holds at two consecutive points.  Returns the stopping abscissa."""
    u = start
    hits = 0
    for _ in range(int(limit)):
        if absfun(u) <= thresh:
            hits += 1
            if hits == 2:
                return u
        else:
            hits = 0
        u += step
    return u


def adaptive_line(f, edges, rtol=1e-10, atol=0.0, n=15, max_panels=20000):
    """Adaptive Gauss-Legendre on consecutive panels ``edges``.

    ``f`` maps a 1-d array of abscissae to values whose first axis runs over
    the abscissae (trailing axes make the integral array-valued).  A panel is
    accepted when its ``n``-point estimate and the sum over its two halves
    agree, in max-norm, to a share of the global target proportional to its
    width, or to rounding level relative to the integral of ``|f|`` over the
    panel; otherwise it is bisected.  Returns ``(value, error_estimate)``.
    """
    x, w = gauss_legendre(n)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    span = float(hi[-1] - lo[0])
    total = 0.0
    err = 0.0
    scale = 0.0
    used = 0
    while lo.size:
        mid = 0.5 * (lo + hi)
        a = np.concatenate([lo, lo, mid])
        b = np.concatenate([hi, mid, hi])
        half = 0.5 * (b - a)
        t = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
        vals = np.asarray(f(t.ravel()))
        vals = vals.reshape(t.shape + vals.shape[1:])
        est = np.tensordot(vals, w, axes=(1, 0))
        est = est * half.reshape((-1,) + (1,) * (est.ndim - 1))
        k = lo.size
        mass = np.tensordot(np.abs(vals[:k]), w, axes=(1, 0)) * half[:k].reshape(
            (-1,) + (1,) * (est.ndim - 1))
        if mass.ndim > 1:
            mass = mass.reshape(k, -1).max(axis=1)
        whole, left, right = est[:k], est[k:2 * k], est[2 * k:]
        fine = left + right
        diff = np.abs(fine - whole)
        if diff.ndim > 1:
            diff = diff.reshape(k, -1).max(axis=1)
        scale = max(scale, _size(total + fine.sum(axis=0)))
        target = max(rtol * scale, atol) * (hi - lo) / span
        ok = (diff <= target) | (diff <= _ROUNDOFF * mass)
        used += k
        if used > max_panels:
            ok[:] = True
        total = total + fine[ok].sum(axis=0)
        err += float(diff[ok].sum())
        lo = np.concatenate([lo[~ok], mid[~ok]])
        hi = np.concatenate([mid[~ok], hi[~ok]])
        order = np.argsort(lo)
        lo, hi = lo[order], hi[order]
    return total, err


def power_tail(f0, f1, edge, step):
    """Tail beyond ``edge`` of a positive integrand with samples ``f0`` at
    ``edge`` and ``f1`` at ``edge + step``, modelled as a power of ``|u|``.

    Exact for algebraic decay and close to ``f0 / kappa`` for exponential
    decay, where the fitted power is large.
    """
    if f0 == 0.0:
        return 0.0
    if f1 <= 0.0 or edge == 0.0:
        return math.inf
    p = math.log(f0 / f1) / math.log1p(abs(step) / abs(edge))
    return f0 * abs(edge) / (p - 1.0) if p > 1.0 else math.inf
