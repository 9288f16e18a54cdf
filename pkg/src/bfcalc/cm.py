"""Numerical complete-monotonicity and Bernstein-property tests.

Derivatives come from the Cauchy integral on a circle of radius ``0.5 x``
around each grid point, discretised by the trapezoid rule (i.e. an FFT of
the samples).  Finite differences are useless beyond order four or so;
the trapezoid rule converges geometrically for functions analytic on a
larger disc.
"""

from dataclasses import dataclass, field
import math
from typing import List, Optional, Tuple

import numpy as np

from .errors import AnalyticityError, DomainError

#: assumed analyticity radius (fraction of x) used to pick the node count
_ANALYTIC_RADIUS = 0.9
_CIRCLE_RADIUS = 0.5


def node_count(target=1e-10, order=8):
    """Trapezoid nodes so that aliasing (r/R)**N stays below ``target``."""
    rho = _CIRCLE_RADIUS / _ANALYTIC_RADIUS
    n = int(math.ceil(math.log(target) / math.log(rho))) + order + 1
    return 1 << max(4, (n - 1).bit_length())


def cauchy_derivatives(f, x, order, nodes=None, radius=None):
    """Return ``(d, scale)``: ``d[k] = f^(k)(x)`` for k = 0..order and the
    Cauchy-estimate scale ``k! max|f| / r**k`` for each k."""
    if x <= 0:
        raise DomainError("grid points must be positive")
    N = nodes or node_count(order=order)
    r = (radius or _CIRCLE_RADIUS) * x
    theta = 2.0 * np.pi * np.arange(N) / N
    pts = x + r * np.exp(1j * theta)
    try:
        with np.errstate(all="ignore"):
            vals = np.asarray(f(pts), dtype=complex)
    except Exception as exc:  # any failure on the circle is an analyticity failure
        raise AnalyticityError("evaluation failed on the circle around x=%g: %s" % (x, exc))
    if vals.shape != pts.shape or not np.all(np.isfinite(vals)):
        raise AnalyticityError("non-finite values on the circle around x=%g" % x)
    coef = np.fft.fft(vals) / N  # Taylor coefficients times r**k
    k = np.arange(order + 1)
    fact = np.array([math.factorial(int(j)) for j in k], dtype=float)
    d = coef[: order + 1] * fact / r ** k
    scale = fact * np.max(np.abs(vals)) / r ** k
    return d, scale


@dataclass
class CMVerdict:
    """Outcome of a complete-monotonicity test.

    ``consistent`` is evidence only; ``violation`` is the first ``(x, k)``
    at which the sign condition failed beyond tolerance.
    """

    consistent: bool
    order: int
    grid: List[float]
    violation: Optional[Tuple[float, int]] = None
    worst_margin: float = math.inf
    table: List[List[float]] = field(default_factory=list)

    def to_dict(self):
        return {
            "consistent": self.consistent,
            "order": self.order,
            "grid": list(self.grid),
            "violation": list(self.violation) if self.violation else None,
            "worst_margin": self.worst_margin,
        }


def _sign_test(f, order, grid, tol, shift, nodes):
    grid = [float(x) for x in grid]
    worst = math.inf
    first = None
    table = []
    for x in grid:
        d, scale = cauchy_derivatives(f, x, order + shift, nodes=nodes)
        row = []
        for k in range(order + 1):
            j = k + shift
            signed = ((-1) ** (j + shift)) * d[j].real
            margin = signed / scale[j]
            row.append(signed)
            worst = min(worst, margin)
            if margin < -tol and first is None:
                first = (x, j)
        table.append(row)
    return CMVerdict(first is None, order, grid, first, worst, table)


def cm_test(f, order=8, grid=(0.5, 1.0, 2.0), tol=1e-8, nodes=None):
    """Check ``(-1)**k f^(k)(x) >= -tol * scale`` for k = 0..order on ``grid``."""
    if not (0 <= order <= 12):
        raise DomainError("order must lie in 0..12")
    return _sign_test(f, order, grid, tol, 0, nodes)


def bernstein_test(f, order=8, grid=(0.5, 1.0, 2.0), tol=1e-8, nodes=None):
    """Check ``f >= 0`` and that ``f'`` passes :func:`cm_test` to ``order``."""
    if not (0 <= order <= 11):
        raise DomainError("order must lie in 0..11")
    head = _sign_test(f, 0, grid, tol, 0, nodes)
    tail = _sign_test(f, order, grid, tol, 1, nodes)
    if not head.consistent:
        return CMVerdict(False, order, head.grid, head.violation,
                         min(head.worst_margin, tail.worst_margin), tail.table)
    return CMVerdict(tail.consistent, order, tail.grid, tail.violation,
                     min(head.worst_margin, tail.worst_margin), tail.table)


def log_grid(lo=1e-2, hi=1e2, n=16):
    return list(np.geomspace(lo, hi, n))


# ratio powers and root transforms ----------------------------------------------


def ratio_power(psi, alpha, beta):
    """``(psi(z**alpha) / z**alpha) ** beta``."""

    def f(z):
        w = np.asarray(z, dtype=complex) ** alpha
        return (psi(w) / w) ** beta

    return f


def root_transform(psi, alpha):
    """``[psi(z**alpha)] ** (1/alpha)``."""

    def f(z):
        return psi(np.asarray(z, dtype=complex) ** alpha) ** (1.0 / alpha)

    return f


def root_transform_derivative(psi, alpha):
    """``psi'(z**alpha) * (psi(z**alpha)/z**alpha) ** (1/alpha - 1)``, the
    derivative of :func:`root_transform`."""

    def f(z):
        w = np.asarray(z, dtype=complex) ** alpha
        return psi.derivative(w, 1) * (psi(w) / w) ** (1.0 / alpha - 1.0)

    return f
