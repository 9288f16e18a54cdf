"""Sectorial matrices: spectral angle, resolvent constants, exponentials.

For a matrix the sectoriality angle is the largest eigenvalue argument, so
``omega`` comes straight from the spectrum.  The constants

* ``M(A) = sup_{s>0} s ||(s+A)^-1||``,
* ``M(A, w) = sup over Sigma_{pi-w} of ||z (z+A)^-1||``,

are estimated by sampling log-spaced radii times equispaced angles and then
refining the worst sample with bounded golden-section searches.  Sampling
gives lower bounds on the suprema; all norms are spectral norms.
"""

from dataclasses import dataclass, field
import hashlib
import math

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from .errors import DomainError, NotSectorialError

MAX_DIM = 64
R_MIN = 1e-6
R_MAX = 1e6
N_RADII = 64
N_ANGLES = 17
_REFINE_RTOL = 1e-4
_REFINE_ROUNDS = 6
#: ||s A|| below this uses the Taylor series for I - exp(-s A)
_TAYLOR_CUT = 0.25
_TAYLOR_TERMS = 18


def as_matrix(A):
    A = np.array(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("matrix must be square")
    if A.shape[0] > MAX_DIM:
        raise DomainError("dimension %d exceeds the cap of %d" % (A.shape[0], MAX_DIM))
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix entries must be finite")
    return A


def spectral_norms(X):
    """Spectral norm of each matrix in a stack ``(N, n, n)``."""
    return np.linalg.svd(X, compute_uv=False)[..., 0]


def scaled_inverse_norms(z, B):
    """``|z| ||(z+B)^-1||`` for every ``z`` in a 1-d array, via the smallest
    singular value (inf where ``z+B`` is singular)."""
    z = np.asarray(z, dtype=complex).ravel()
    n = B.shape[0]
    stack = B[None, :, :] + z[:, None, None] * np.eye(n)[None, :, :]
    smin = np.linalg.svd(stack, compute_uv=False)[:, -1]
    with np.errstate(divide="ignore"):
        return np.where(smin > 0, np.abs(z) / smin, np.inf)


def is_normal(A, rtol=1e-12):
    A = np.asarray(A, dtype=complex)
    scale = max(np.linalg.norm(A, 2) ** 2, 1e-300)
    comm = A.conj().T @ A - A @ A.conj().T
    return np.linalg.norm(comm, 2) <= rtol * scale


def sector_sup(B, half_angle, r_min=R_MIN, r_max=R_MAX, n_radii=N_RADII,
               n_angles=N_ANGLES, refine=True):
    """Sampled ``sup ||z (z+B)^-1||`` over the closed sector ``|arg z| <= half_angle``.

    Returns ``(value, worst_z, history)`` where ``history`` lists the value
    after the grid pass and after each refinement round.
    """
    radii = np.geomspace(r_min, r_max, n_radii)
    if half_angle == 0.0:
        angles = np.zeros(1)
    else:
        angles = np.linspace(-half_angle, half_angle, n_angles)
    grid = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    vals = scaled_inverse_norms(grid, B).reshape(radii.size, angles.size)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = float(vals[i, j])
    history = [best]
    if not refine or not np.isfinite(best):
        return best, complex(grid[i * angles.size + j]), history

    logr = math.log(radii[i])
    th = float(angles[j])
    du = math.log(radii[1] / radii[0])
    dth = angles[1] - angles[0] if angles.size > 1 else 0.0

    def value(u, t):
        return float(scaled_inverse_norms(np.array([math.exp(u) * complex(math.cos(t), math.sin(t))]), B)[0])

    for _ in range(_REFINE_ROUNDS):
        prev = best
        lo = max(logr - du, math.log(r_min))
        hi = min(logr + du, math.log(r_max))
        res = minimize_scalar(lambda u: -value(u, th), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-6})
        if -res.fun > best:
            best, logr = -res.fun, float(res.x)
        if dth > 0:
            lo = max(th - dth, -half_angle)
            hi = min(th + dth, half_angle)
            res = minimize_scalar(lambda t: -value(logr, t), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-7})
            if -res.fun > best:
                best, th = -res.fun, float(res.x)
        history.append(best)
        if best - prev <= _REFINE_RTOL * best:
            break
    return best, complex(math.exp(logr) * complex(math.cos(th), math.sin(th))), history


@dataclass(frozen=True, eq=False)
class SectorialMatrix:
    """A matrix with its sector angle and resolvent constant.

    ``M_sector`` values and matrix exponentials are memoised; both are
    idempotent, so sharing an instance is safe.
    """

    A: np.ndarray
    omega: float
    M: float
    eigenvalues: np.ndarray
    metadata: dict = field(default_factory=dict)
    _sector_cache: dict = field(default_factory=dict, repr=False)
    _exp_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def fingerprint(self):
        return hashlib.sha1(np.ascontiguousarray(self.A).tobytes()).hexdigest()[:16]

    @property
    def normal(self):
        return is_normal(self.A)

    def M_sector(self, omega):
        """Sampled ``sup ||z (z+A)^-1||`` over ``Sigma_{pi-omega}``; needs
        ``omega`` above the spectral angle."""
        omega = float(omega)
        if not (self.omega < omega < math.pi):
            raise DomainError("M(A, omega) needs omega in (%.6g, pi)" % self.omega)
        if omega not in self._sector_cache:
            val, worst, hist = sector_sup(self.A, math.pi - omega)
            self._sector_cache[omega] = (val, worst, hist)
        return self._sector_cache[omega][0]

    def expm_neg(self, s):
        """``exp(-s A)`` for each ``s`` in a 1-d array, memoised per node."""
        s = np.asarray(s, dtype=float).ravel()
        missing = [x for x in dict.fromkeys(s.tolist()) if x not in self._exp_cache]
        if missing:
            m = np.array(missing)
            with np.errstate(all="ignore"):
                E = expm(-m[:, None, None] * self.A[None, :, :])
            for x, e in zip(missing, E):
                self._exp_cache[x] = e
        return np.stack([self._exp_cache[x] for x in s.tolist()]) if s.size else \
            np.zeros((0, self.n, self.n), dtype=complex)

    def one_minus_expm(self, s):
        """``I - exp(-s A)`` without cancellation for small ``s``."""
        s = np.asarray(s, dtype=float).ravel()
        n = self.n
        out = np.empty((s.size, n, n), dtype=complex)
        small = s * np.linalg.norm(self.A, 2) < _TAYLOR_CUT
        if np.any(small):
            X = -s[small][:, None, None] * self.A[None, :, :]
            term = X.copy()
            acc = X.copy()
            for k in range(2, _TAYLOR_TERMS + 1):
                term = term @ X / k
                acc += term
            out[small] = -acc
        if np.any(~small):
            out[~small] = np.eye(n)[None, :, :] - self.expm_neg(s[~small])
        return out

    def semigroup_sup(self, t_max=None):
        """Sampled ``sup_{t>=0} ||exp(-t A)||`` (at least 1, the value at t = 0)."""
        if float(np.min(self.eigenvalues.real)) < 0:
            return math.inf
        hi = t_max or R_MAX
        t = np.geomspace(R_MIN, hi, 4 * N_RADII)
        with np.errstate(all="ignore"):
            E = expm(-t[:, None, None] * self.A[None, :, :])
        norms = spectral_norms(E)
        i = int(np.argmax(norms))
        best = float(norms[i])
        if 0 < i < t.size - 1:
            f = lambda u: -float(spectral_norms(expm(-math.exp(u) * self.A)[None])[0])
            res = minimize_scalar(f, bounds=(math.log(t[i - 1]), math.log(t[i + 1])),
                                  method="bounded")
            best = max(best, -res.fun)
        return max(1.0, best)


def make_sectorial(A):
    """Validate ``A`` and estimate its sector angle and ``M(A)``."""
    A = as_matrix(A)
    eig = np.linalg.eigvals(A)
    scale = max(float(np.max(np.abs(eig))), 1e-300)
    on_cut = (np.abs(eig.imag) <= 1e-12 * max(scale, 1.0)) & (eig.real <= 1e-14 * scale)
    if np.any(on_cut) or np.all(A == 0):
        raise NotSectorialError("eigenvalue %r lies on (-inf, 0]" % complex(eig[on_cut][0])
                                if np.any(on_cut) else "zero matrix")
    args = np.abs(np.angle(eig))
    omega = float(np.max(args))
    # M(A) is the sup along the positive axis (angle 0) of |s| ||(s+A)^-1||;
    # it tends to 1 as s -> inf, so 1 is included as the limiting value
    M, worst, hist = sector_sup(A, 0.0, n_radii=4 * N_RADII)
    M = max(M, 1.0)
    meta = {
        "grid": {"r_min": R_MIN, "r_max": R_MAX, "n_radii": 4 * N_RADII},
        "refinement": hist,
        "worst_s": worst.real,
        "spectral_angle": omega,
    }
    return SectorialMatrix(A, omega, M, eig, meta)


def ensure_sectorial(A):
    return A if isinstance(A, SectorialMatrix) else make_sectorial(A)


# -- JSON I/O ---------------------------------------------------------------


def matrix_to_json(A):
    """Row-major nested list of ``[re, im]`` pairs."""
    A = np.asarray(A, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in A]


def matrix_from_json(rows):
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise DomainError("matrix JSON must be rows of [re, im] pairs")
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise DomainError("matrix JSON must be rows of [re, im] pairs")
    return as_matrix(arr[..., 0] + 1j * arr[..., 1])
