"""Functional calculi for dense matrices.

* :func:`hirsch_apply`: ``a I + b A + int A (s+A)^-1 sigma(ds)`` for a
  Stieltjes triple.
* :func:`associated_apply`: ``a I + b A + int s A (I + s A)^-1 nu(ds)``,
  the associated complete Bernstein function of a Lévy triple.
* :func:`levy_apply`: ``a I + b A + int (I - exp(-s A)) mu(ds)``.
* :func:`contour_apply`: ``(1/2 pi i) int f(l) (l - A)^-1 dl`` over the
  boundary of a sector, positively oriented around the spectrum.
* :func:`kato_fracpow_resolvent`: ``(A^r + z)^-1`` by Kato's real integral.
* :func:`eigen_oracle`: ``U f(D) U*`` for normal matrices, the ground truth
  for the other routines.
"""

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .bernstein import BernsteinFn, Power, StieltjesCBF, _near_cut, resolvent_diff_scalar
from .errors import ContourError, ConvergenceError, DomainError, NearSpectrumError
from .measures import Far
from .quadrature import adaptive_line, power_tail
from .sectorial import ensure_sectorial, is_normal, spectral_norms

_FAR_FACTOR = 1e7
#: exp(-x) below this is negligible for the semigroup cut
_DECAY = 40.0
_CONTOUR_MARGIN = 1e-3
_U_LIMIT = 300.0
#: accepted quadrature error (relative) before a ConvergenceError is raised
_ACCEPT = 1e-6


def _norm(X):
    return float(np.linalg.norm(X, 2))


def _checked(val, err, what):
    scale = max(1.0, _norm(val))
    if not np.all(np.isfinite(val)) or err > _ACCEPT * scale:
        raise ConvergenceError("%s quadrature reached only %.3e" % (what, err), err)
    return val


def resolvent(A, z):
    """``(z + A)^-1`` by LU with partial pivoting."""
    A = A.A if hasattr(A, "A") else np.asarray(A, dtype=complex)
    n = A.shape[0]
    B = A + complex(z) * np.eye(n)
    s = np.linalg.svd(B, compute_uv=False)
    if s[-1] <= 1e-14 * max(s[0], 1e-300):
        raise NearSpectrumError("z + A is singular to working precision", float(s[-1]))
    lu = sla.lu_factor(B, check_finite=False)
    return sla.lu_solve(lu, np.eye(n, dtype=complex), check_finite=False)


def eigen_oracle(f, A):
    """``U diag(f(d)) U*`` from the complex Schur form of a normal matrix.

    ``f`` is any vectorised callable; Bernstein functions are evaluated by
    their holomorphic extension when an eigenvalue leaves the half-plane.
    """
    A = A.A if hasattr(A, "A") else np.asarray(A, dtype=complex)
    if not is_normal(A):
        raise DomainError("eigen oracle refuses non-normal matrices")
    T, U = sla.schur(A, output="complex")
    d = np.diag(T)
    if isinstance(f, BernsteinFn) and np.any(d.real < 0):
        vals = f.extend(d)
    else:
        vals = np.asarray(f(d), dtype=complex)
    return (U * vals[None, :]) @ U.conj().T


# -- Hirsch / Stieltjes ------------------------------------------------------


def _stieltjes_of(phi):
    if isinstance(phi, (tuple, list)):
        return phi
    return phi.stieltjes()


def hirsch_apply(phi, A, tol=1e-10, return_error=False):
    """``phi(A)`` for a complete Bernstein function with Stieltjes triple."""
    S = ensure_sectorial(A)
    a, b, sigma = _stieltjes_of(phi)
    M = S.A
    n = S.n
    eye = np.eye(n, dtype=complex)
    out = a * eye + b * M
    err = 0.0
    if not sigma.is_zero:
        eig = S.eigenvalues

        def kernel(s):
            stack = s[:, None, None] * eye[None] + M[None]
            return np.linalg.solve(stack, np.broadcast_to(M, stack.shape))

        far = Far(_FAR_FACTOR * max(float(np.max(np.abs(eig))), 1.0), 0.0, M, -M @ M)
        val, err = sigma.integrate(kernel, far=far, vanish=0, tol=tol, return_error=True,
                                   scale=1.0 / float(np.min(np.abs(eig))),
                                   poles=_near_cut(-eig))
        out = out + val
        _checked(out, err, "Hirsch")
    return (out, err) if return_error else out


def associated_apply(psi, A, tol=1e-10, return_error=False):
    """``phi(A)`` for the associated function of ``psi``'s Lévy triple."""
    S = ensure_sectorial(A)
    a, b, nu = psi.triple() if hasattr(psi, "triple") else (psi.a, psi.b, psi.nu)
    M = S.A
    n = S.n
    eye = np.eye(n, dtype=complex)
    out = a * eye + b * M
    err = 0.0
    if not nu.is_zero:
        eig = S.eigenvalues
        Minv = np.linalg.inv(M)

        def kernel(s):
            sM = s[:, None, None] * M[None]
            return np.linalg.solve(eye[None] + sM, sM)

        # s A (1 + s A)^-1 = I - (sA)^-1 + (sA)^-2 - ...
        far = Far(_FAR_FACTOR / min(float(np.min(np.abs(eig))), 1.0), eye, -Minv, Minv @ Minv)
        val, err = nu.integrate(kernel, far=far, vanish=1, tol=tol, return_error=True,
                                scale=float(np.max(np.abs(eig))),
                                poles=_near_cut(-1.0 / eig))
        out = out + val
        _checked(out, err, "associated")
    return (out, err) if return_error else out


# -- Hille-Phillips / Lévy-Khintchine ----------------------------------------


def levy_apply(psi, A, tol=1e-10, return_error=False):
    """``psi(A)`` through the Lévy triple and the semigroup ``exp(-s A)``."""
    S = ensure_sectorial(A)
    a, b, mu = psi.triple()
    M = S.A
    n = S.n
    eye = np.eye(n, dtype=complex)
    out = a * eye + b * M
    err = 0.0
    if mu.is_zero:
        return (out, err) if return_error else out
    eig = S.eigenvalues
    re_min = float(np.min(eig.real))
    rho = float(np.max(np.abs(eig)))
    if re_min < -1e-12 * max(rho, 1.0):
        raise DomainError("exp(-sA) grows without bound: A does not generate a bounded semigroup")
    if mu.atoms:
        x = np.array([p for p, _ in mu.atoms])
        E = S.one_minus_expm(x)
        norms = spectral_norms(np.eye(n)[None] - E)
        if np.any(norms > 1e8):
            raise DomainError("unbounded growth of exp(-sA) detected")
    heavy = any(t.c == 0.0 for t in mu.tails)
    if heavy and re_min <= 0:
        raise ConvergenceError("power-law Lévy tail needs spectrum in Re > 0", math.inf)
    far = Far(max(_DECAY / re_min, 1.0), eye, 0.0, 0.0) if re_min > 0 else None
    val, err = mu.integrate(S.one_minus_expm, rates=eig, growth=0, far=far, vanish=1,
                            tol=tol, return_error=True, scale=rho)
    out = out + val
    _checked(out, err, "Lévy-Khintchine")
    return (out, err) if return_error else out


def shift_difference_apply(psi, A, eps, tol=1e-10):
    """``[psi(. + eps) - psi(.)](A) = b eps I + int exp(-sA)(1 - exp(-eps s)) mu(ds)``."""
    S = ensure_sectorial(A)
    a, b, mu = psi.triple()
    n = S.n
    out = b * eps * np.eye(n, dtype=complex)
    if mu.is_zero:
        return out
    eig = S.eigenvalues
    re_min = float(np.min(eig.real))
    if re_min < 0:
        raise DomainError("exp(-sA) grows without bound")

    def kernel(s):
        return S.expm_neg(s) * (-np.expm1(-eps * s))[:, None, None]

    far = Far(max(_DECAY / max(re_min, 1e-300), 1.0), 0.0, 0.0, 0.0)
    val, err = mu.integrate(kernel, rates=eig + eps, far=far, vanish=1, tol=tol,
                            return_error=True, scale=float(np.max(np.abs(eig))))
    return _checked(out + val, err, "shift")


# -- contour calculus ----------------------------------------------------------


@dataclass
class SectorContour:
    """``d Sigma_beta`` parametrised by ``l = exp(u +- i beta)``.

    After :func:`contour_apply` the truncation bounds ``u_range``, the
    accepted error estimate and the tail estimate are filled in.
    """

    beta: float
    rtol: float = 1e-10
    orientation: str = "counterclockwise"
    u_range: Optional[tuple] = None
    error: float = 0.0
    tail: float = 0.0
    breaks: list = field(default_factory=list)

    def __post_init__(self):
        if not (0.0 < self.beta < math.pi):
            raise DomainError("contour half-angle must lie in (0, pi)")


def contour_apply(f, A, contour=None, beta=None, rtol=1e-10, return_contour=False, atol=0.0):
    """``f(A) = (1/2 pi i) int f(l) (l - A)^-1 dl`` over ``d Sigma_beta``.

    The boundary runs in along the upper ray and out along the lower one,
    so with ``l_+- = exp(u +- i beta)`` the integral becomes
    ``(1/2 pi i) int [l_- f(l_-) (l_- - A)^-1 - l_+ f(l_+) (l_+ - A)^-1] du``.
    ``f`` must be holomorphic on a sector beyond ``beta`` and decay at 0 and
    infinity.  ``atol`` is an absolute accuracy target for callers that
    compare the result with larger matrices.
    """
    S = ensure_sectorial(A)
    if contour is None:
        if beta is None:
            raise DomainError("give a contour or its half-angle beta")
        contour = SectorContour(float(beta), rtol)
    beta = contour.beta
    if beta - S.omega < _CONTOUR_MARGIN:
        raise ContourError("contour angle %.6g is within %.0e of the spectral angle %.6g"
                           % (beta, _CONTOUR_MARGIN, S.omega))
    M = S.A
    n = S.n
    eye = np.eye(n, dtype=complex)
    rays = np.exp(1j * np.array([-beta, beta]))
    sign = np.array([1.0, -1.0])

    def integrand(u):
        u = np.asarray(u, dtype=float)
        lam = (np.exp(u)[:, None] * rays[None, :]).ravel()
        fv = np.asarray(f(lam), dtype=complex)
        R = np.linalg.inv(lam[:, None, None] * eye[None] - M[None])
        terms = (lam * fv)[:, None, None] * R
        terms = terms.reshape(u.size, 2, n, n)
        return np.tensordot(terms, sign, axes=(1, 0)) / (2j * math.pi)

    def size(u):
        return float(_norm(integrand(np.array([u]))[0]))

    logs = np.log(np.abs(S.eigenvalues))
    lo = math.floor(min(-30.0, float(np.min(logs)) - 30.0))
    hi = math.ceil(max(30.0, float(np.max(logs)) + 30.0))
    edges = np.unique(np.concatenate([np.arange(lo, hi + 0.5, 1.0), logs]))
    total, err = adaptive_line(integrand, edges, rtol=contour.rtol * 0.1, atol=0.1 * atol)
    breaks = [(lo, hi)]

    def tail(edge, step):
        return power_tail(size(edge), size(edge + step), edge, step)

    for side in (-1.0, 1.0):
        while True:
            edge = lo if side < 0 else hi
            t = tail(edge, side)
            scale = max(_norm(total), 1e-300)
            if t <= max(contour.rtol * 0.1 * scale, 0.1 * atol) or abs(edge) >= _U_LIMIT:
                break
            new = edge + side * 20.0
            seg = np.arange(min(edge, new), max(edge, new) + 0.5, 1.0)
            part, perr = adaptive_line(integrand, seg, rtol=contour.rtol * 0.1,
                                       atol=0.1 * max(contour.rtol * scale, atol))
            total = total + part
            err += perr
            if side < 0:
                lo = new
            else:
                hi = new
            breaks.append((lo, hi))
    tail_est = tail(lo, -1.0) + tail(hi, 1.0)
    contour.u_range = (lo, hi)
    contour.error = float(err)
    contour.tail = float(tail_est)
    contour.breaks = breaks
    scale = max(_norm(total), 1.0)
    if not (err + tail_est <= _ACCEPT * scale):
        raise ConvergenceError("contour quadrature reached only %.3e" % (err + tail_est),
                               err + tail_est)
    return (total, contour) if return_contour else total


def tau(lam):
    """The regulariser ``l / (1 + l)^2``."""
    lam = np.asarray(lam, dtype=complex)
    return lam / (1.0 + lam) ** 2


# -- resolvent identity ----------------------------------------------------------


def resolvent_identity_parts(psi, A, z, omega=None, beta=None, phi=None):
    """The three matrices of the identity
    ``(z + psi(A))^-1 = (z + phi(A))^-1 + r(A; z)``.

    ``omega`` defaults to the midpoint of the admissible range above
    ``max(pi/2, |arg z|)`` and ``beta`` to the midpoint of
    ``(omega_A, pi - omega)``.
    """
    S = ensure_sectorial(A)
    z = complex(z)
    if S.omega >= 0.5 * math.pi:
        raise DomainError("resolvent identity needs spectral angle below pi/2")
    theta = 0.5 * math.pi - S.omega
    argz = abs(np.angle(z))
    if z == 0:
        raise DomainError("z must be nonzero")
    if omega is None:
        lo = max(0.5 * math.pi, argz)
        omega = 0.5 * (lo + 0.5 * math.pi + theta)
    if not (0.5 * math.pi < omega < 0.5 * math.pi + theta) or argz >= omega:
        raise DomainError("need pi/2 < omega < pi/2 + theta and |arg z| < omega")
    if beta is None:
        beta = 0.5 * (S.omega + math.pi - omega)
    if not (S.omega < beta < math.pi - omega):
        raise DomainError("beta must lie between the spectral angle and pi - omega")
    phi = phi if phi is not None else psi.associated()
    n = S.n
    eye = np.eye(n, dtype=complex)
    left = np.linalg.inv(z * eye + levy_apply(psi, S))
    right = np.linalg.inv(z * eye + associated_apply(psi, S))
    r = lambda lam: resolvent_diff_scalar(psi, lam, z, phi=phi)
    # r(A; z) is compared with the two resolvents, so their size sets the
    # absolute accuracy it needs
    size = max(_norm(left), _norm(right))
    corr = contour_apply(r, S, beta=beta, atol=1e-12 * size)
    return left, right, corr


def resolvent_identity_residual(psi, A, z, omega=None, beta=None):
    """``||(z+psi(A))^-1 - (z+phi(A))^-1 - r(A; z)||`` (spectral norm)."""
    left, right, corr = resolvent_identity_parts(psi, A, z, omega, beta)
    return _norm(left - right - corr)


# -- Kato's formula --------------------------------------------------------------


def kato_fracpow_resolvent(A, r, z, gamma=None, rtol=1e-11):
    """``(A^r + z)^-1 = sin(pi r)/pi int t^r (A+t)^-1 dt / (t^2r + 2 t^r z cos(pi r) + z^2)``.

    Integrated in ``u = log t``.  ``gamma`` (default: just inside
    ``(1-r) pi``) only serves the domain check ``z in Sigma_gamma``.
    """
    S = ensure_sectorial(A)
    r = float(r)
    z = complex(z)
    if not (0.0 < r < 1.0):
        raise DomainError("r must lie in (0, 1)")
    if gamma is None:
        gamma = (1.0 - r) * math.pi
    elif not (0.0 < gamma < (1.0 - r) * math.pi):
        raise DomainError("gamma must lie in (0, (1-r) pi)")
    if z == 0 or abs(np.angle(z)) >= gamma:
        raise DomainError("z must lie in the open sector Sigma_gamma")
    M = S.A
    n = S.n
    eye = np.eye(n, dtype=complex)
    c = math.cos(math.pi * r)

    def integrand(u):
        t = np.exp(np.asarray(u, dtype=float))
        tr = t ** r
        R = np.linalg.inv(t[:, None, None] * eye[None] + M[None])
        w = t * tr / (tr * tr + 2.0 * tr * z * c + z * z)
        return w[:, None, None] * R

    eig = S.eigenvalues
    logs = np.log(np.abs(np.concatenate([eig, [z ** (1.0 / r)]])))
    # decay like t^(r+1) at 0 and t^-r at infinity
    digits = -math.log(rtol * 1e-2)
    lo = float(np.min(logs)) - digits / (r + 1.0)
    hi = float(np.max(logs)) + digits / r
    edges = np.unique(np.concatenate([np.arange(math.floor(lo), math.ceil(hi) + 0.5, 1.0), logs]))
    val, err = adaptive_line(integrand, edges, rtol=rtol)
    out = math.sin(math.pi * r) / math.pi * val
    return _checked(out, err * math.sin(math.pi * r) / math.pi, "Kato")


def kato_bound(M, r, gamma, z):
    """``M sin(pi r)/(pi r) * (pi r + gamma)/sin(pi r + gamma) / |z|``."""
    pr = math.pi * r
    return M * math.sin(pr) / pr * (pr + gamma) / math.sin(pr + gamma) / abs(z)


def kato_bound_holds(A, r, z, gamma, slack=1e-4):
    """Predicate: ``||(A^r + z)^-1||`` does not exceed :func:`kato_bound` with ``M(A)``."""
    S = ensure_sectorial(A)
    lhs = _norm(kato_fracpow_resolvent(S, r, z, gamma))
    return lhs <= kato_bound(S.M, r, gamma, z) * (1.0 + slack)


def fractional_power(A, alpha):
    """``A^alpha`` for ``alpha > 0``: integer part by products, the rest by
    the Hirsch calculus of ``z^frac``."""
    S = ensure_sectorial(A)
    k = int(math.floor(alpha))
    frac = alpha - k
    out = np.linalg.matrix_power(S.A, k) if k else np.eye(S.n, dtype=complex)
    if frac > 1e-15:
        out = out @ hirsch_apply(Power(frac), S)
    return out


def as_cbf(phi):
    """Wrap a Stieltjes triple as a function object."""
    if isinstance(phi, BernsteinFn):
        return phi
    a, b, sigma = phi
    return StieltjesCBF(a, b, sigma)
