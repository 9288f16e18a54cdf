"""Bernstein, complete Bernstein and potential functions.

Every function evaluates on arrays of complex arguments.  Bernstein
functions live on the closed right half-plane; complete Bernstein functions
given by a Stieltjes triple, and the associated function of a Lévy triple,
extend to the slit plane ``C \\ (-inf, 0]``.
"""

import math

import numpy as np
from scipy.special import exp1 as _exp1
from scipy.special import gamma as _gamma

from .errors import DomainError, SpecError, UnsupportedRepresentation
from .measures import EMPTY, Far, RadonMeasure

_HALF_PLANE_SLACK = 1e-14
_FAR_FACTOR = 1e7


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _out(arr, like):
    arr = np.asarray(arr, dtype=complex)
    if np.ndim(like) == 0:
        return complex(arr.reshape(()))
    return arr


def _check_half_plane(z):
    if np.any(z.real < -_HALF_PLANE_SLACK * np.maximum(1.0, np.abs(z))):
        raise DomainError("Bernstein functions are evaluated on Re z >= 0")


def _check_slit(z):
    if np.any((z.imag == 0) & (z.real <= 0)):
        raise DomainError("argument on the cut (-inf, 0]")


def _check_order(k):
    if k not in (1, 2, 3):
        raise DomainError("derivative order %r unsupported (use 1, 2 or 3)" % (k,))


def _near_cut(p):
    """(position, width) of kernel poles ``p`` lying close to the positive axis."""
    p = np.ravel(p)
    near = (p.real > 0) & (np.abs(p.imag) < 0.5 * p.real)
    if not np.any(near):
        return None
    return np.column_stack([p.real[near], np.abs(p.imag[near])])


class BernsteinFn:
    """Base class.  Subclasses implement ``_eval`` and ``_deriv``."""

    kind = "bernstein"
    #: closed form valid on the whole slit plane
    _entire_formula = False

    def __call__(self, z):
        zz = _as_complex(z)
        _check_half_plane(zz)
        return _out(self._eval(zz), z)

    def derivative(self, z, k=1):
        """k-th complex derivative, ``k`` in 1..3, for ``Re z > 0``."""
        _check_order(k)
        zz = _as_complex(z)
        _check_half_plane(zz)
        return _out(self._deriv(zz, k), z)

    def extend(self, z):
        """Holomorphic extension to ``C \\ (-inf, 0]``.

        Available for closed forms valid off the cut and for anything with a
        Stieltjes representation.
        """
        zz = _as_complex(z)
        _check_slit(zz)
        return _out(self._extend(zz), z)

    def _extend(self, z):
        if self._entire_formula:
            return self._eval(z)
        a, b, sigma = self.stieltjes()
        return StieltjesCBF(a, b, sigma)._eval(z)

    # representation hooks -------------------------------------------
    def triple(self):
        """Lévy triple ``(a, b, mu)``."""
        raise UnsupportedRepresentation("%s has no Lévy triple" % type(self).__name__)

    def stieltjes(self):
        """Stieltjes triple ``(a, b, sigma)`` when the function is complete Bernstein."""
        raise UnsupportedRepresentation("%s has no Stieltjes representation" % type(self).__name__)

    @property
    def has_triple(self):
        try:
            self.triple()
            return True
        except UnsupportedRepresentation:
            return False

    def associated(self):
        """The associated complete Bernstein function (same triple, kernel ``ls/(1+ls)``)."""
        a, b, mu = self.triple()
        return AssociatedCBF(a, b, mu)

    def levy_evaluate(self, z):
        """Evaluate through the Lévy triple, ignoring any closed form."""
        a, b, mu = self.triple()
        zz = _as_complex(z)
        _check_half_plane(zz)
        val = a + b * zz
        if not mu.is_zero:
            val = val + mu.lk(zz)
        return _out(val, z)

    def levy_derivative(self, z, k=1):
        _check_order(k)
        a, b, mu = self.triple()
        zz = _as_complex(z)
        val = np.full(zz.shape, b if k == 1 else 0.0, dtype=complex)
        if not mu.is_zero:
            val = val + (-1) ** (k + 1) * mu.laplace_moment(zz, k)
        return _out(val, z)

    def c_psi(self):
        """Growth constant ``a + b + int_0^1 s mu + 2 int_1^inf mu``."""
        a, b, mu = self.triple()
        if mu.is_zero:
            return a + b
        below = mu.restrict(0.0, 1.0)
        above = mu.restrict(1.0, math.inf)
        lo = below.integrate(lambda s: s, vanish=1) if not below.is_zero else 0.0
        hi = above.integrate(lambda s: np.ones_like(s), vanish=0,
                             far=Far(1.0, 1.0, 0.0)) if not above.is_zero else 0.0
        return float(a + b + np.real(lo) + 2.0 * np.real(hi))

    @property
    def bounded(self):
        """True when ``b == 0`` and the Lévy measure is finite."""
        a, b, mu = self.triple()
        if b > 0:
            return False
        return all(g.p > -1.0 or g.lo > 0 for g in mu.segments) and all(
            (t.c > 0 and (t.q > -1.0 or t.start > 0)) or t.q < -1.0 for t in mu.tails)

    def spec(self):
        return {"kind": self.kind}

    def __add__(self, other):
        return Sum((self, other))

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, self.spec())


class Affine(BernsteinFn):
    """``a + b z``."""

    kind = "affine"
    _entire_formula = True

    def __init__(self, a=0.0, b=1.0):
        if a < 0 or b < 0:
            raise SpecError("affine needs a, b >= 0")
        self.a = float(a)
        self.b = float(b)

    def _eval(self, z):
        return self.a + self.b * z

    def _deriv(self, z, k):
        return np.full(z.shape, self.b if k == 1 else 0.0, dtype=complex)

    def triple(self):
        return self.a, self.b, EMPTY

    def stieltjes(self):
        return self.a, self.b, EMPTY

    def spec(self):
        return {"kind": "affine", "a": self.a, "b": self.b}


class Power(BernsteinFn):
    """``z**alpha`` (principal branch), ``0 < alpha <= 1``."""

    kind = "power"
    _entire_formula = True

    def __init__(self, alpha):
        alpha = float(alpha)
        if not (0.0 < alpha <= 1.0):
            raise SpecError("alpha out of (0,1]")
        self.alpha = alpha

    def _eval(self, z):
        return z ** self.alpha

    def _deriv(self, z, k):
        al = self.alpha
        coef = al
        for j in range(1, k):
            coef *= al - j
        return coef * z ** (al - k)

    def triple(self):
        al = self.alpha
        if al == 1.0:
            return 0.0, 1.0, EMPTY
        K = al / _gamma(1.0 - al)
        return 0.0, 0.0, RadonMeasure.power_exp(0.0, None, K, -1.0 - al)

    def associated(self):
        al = self.alpha
        a, b, mu = self.triple()
        if al == 1.0:
            return AssociatedCBF(a, b, mu)
        g = _gamma(1.0 + al)

        def value(l):
            return g * l ** al

        def deriv(l, k):
            coef = al
            for j in range(1, k):
                coef *= al - j
            return g * coef * l ** (al - k)

        def defect(l):
            return (1.0 - g) * l ** al

        return AssociatedCBF(a, b, mu, closed=(value, deriv, defect))

    def stieltjes(self):
        al = self.alpha
        if al == 1.0:
            return 0.0, 1.0, EMPTY
        K = math.sin(al * math.pi) / math.pi
        return 0.0, 0.0, RadonMeasure.power_exp(0.0, None, K, al - 1.0)

    def spec(self):
        return {"kind": "power", "alpha": self.alpha}


class Log1p(BernsteinFn):
    """``log(1 + z)``."""

    kind = "log1p"
    _entire_formula = True

    def _eval(self, z):
        return np.log1p(z)

    def _deriv(self, z, k):
        return (-1) ** (k + 1) * math.factorial(k - 1) * (1.0 + z) ** (-k)

    def triple(self):
        return 0.0, 0.0, RadonMeasure.power_exp(0.0, None, 1.0, -1.0, 1.0)

    def stieltjes(self):
        return 0.0, 0.0, RadonMeasure.power_exp(1.0, None, 1.0, -1.0)

    def associated(self):
        # phi(l) = g(1/l) with g(x) = exp(x) E1(x), g' = g - 1/x, g'' = g' + 1/x^2
        a, b, mu = self.triple()

        m = np.arange(1, _SERIES_TERMS + 1)
        coef = np.array([(-1.0) ** (j - 1) * math.factorial(int(j) - 1) for j in m])

        def split(l, fn, series_fn):
            l = np.atleast_1d(l)
            out = np.empty(l.shape, dtype=complex)
            sm = np.abs(l) < 1.0 / _SERIES_SWITCH
            if np.any(sm):
                out[sm] = series_fn(l[sm])
            if np.any(~sm):
                out[~sm] = fn(l[~sm])
            return out

        def value(l):
            return split(l, lambda v: exp_e1(1.0 / v), lambda v: _power_series(coef, v, 0))

        def deriv(l, k):
            return split(l, lambda v: _deriv_big(v, k), lambda v: _power_series(coef, v, k))

        def _deriv_big(l, k):
            x = 1.0 / l
            g = exp_e1(x)
            g1 = g - l
            if k == 1:
                return -g1 * x ** 2
            g2 = g1 + l ** 2
            if k == 2:
                return g2 * x ** 4 + 2.0 * g1 * x ** 3
            g3 = g2 - 2.0 * l ** 3
            return -(g3 * x ** 6 + 6.0 * g2 * x ** 5 + 6.0 * g1 * x ** 4)

        def defect(l):
            return np.log1p(l) - value(l)

        return AssociatedCBF(a, b, mu, closed=(value, deriv, defect))


class OneMinusExp(BernsteinFn):
    """``c (1 - exp(-r z))``; bounded, not complete Bernstein."""

    kind = "one_minus_exp"
    _entire_formula = True

    def __init__(self, c=1.0, r=1.0):
        if c <= 0 or r <= 0:
            raise SpecError("one_minus_exp needs c, r > 0")
        self.c = float(c)
        self.r = float(r)

    def _eval(self, z):
        return -self.c * np.expm1(-self.r * z)

    def _deriv(self, z, k):
        return (-1) ** (k + 1) * self.c * self.r ** k * np.exp(-self.r * z)

    def triple(self):
        return 0.0, 0.0, RadonMeasure.dirac(self.r, self.c)

    def spec(self):
        return {"kind": "one_minus_exp", "c": self.c, "r": self.r}


class LevyBernstein(BernsteinFn):
    """General Lévy triple ``(a, b, mu)``."""

    kind = "levy"

    def __init__(self, a=0.0, b=0.0, mu=EMPTY, spec=None):
        if a < 0 or b < 0:
            raise SpecError("Lévy triple needs a, b >= 0")
        self.a = float(a)
        self.b = float(b)
        self.mu = mu
        if not mu.is_zero:
            mu.levy_mass()
        self._spec = spec

    def _eval(self, z):
        val = self.a + self.b * z
        if not self.mu.is_zero:
            val = val + self.mu.lk(z)
        return val

    def _deriv(self, z, k):
        val = np.full(z.shape, self.b if k == 1 else 0.0, dtype=complex)
        if not self.mu.is_zero:
            val = val + (-1) ** (k + 1) * self.mu.laplace_moment(z, k)
        return val

    def triple(self):
        return self.a, self.b, self.mu

    def spec(self):
        if self._spec is not None:
            return dict(self._spec)
        return {"kind": "levy", "a": self.a, "b": self.b,
                "atoms": [list(x) for x in self.mu.atoms],
                "segments": [{"lo": t.start, "hi": None, "k": t.K, "q": t.q, "c": t.c}
                             for t in self.mu.tails]}


class Sum(BernsteinFn):
    """Sum of Bernstein functions."""

    kind = "sum"

    def __init__(self, terms):
        self.terms = tuple(terms)
        if not self.terms:
            raise SpecError("sum needs at least one term")

    def _eval(self, z):
        return sum(t._eval(z) for t in self.terms)

    def _extend(self, z):
        return sum(t._extend(z) for t in self.terms)

    def _deriv(self, z, k):
        return sum(t._deriv(z, k) for t in self.terms)

    def triple(self):
        a = b = 0.0
        mu = EMPTY
        for t in self.terms:
            ta, tb, tm = t.triple()
            a += ta
            b += tb
            mu = mu + tm
        return a, b, mu

    def stieltjes(self):
        a = b = 0.0
        sig = EMPTY
        for t in self.terms:
            ta, tb, ts = t.stieltjes()
            a += ta
            b += tb
            sig = sig + ts
        return a, b, sig

    def spec(self):
        return {"kind": "sum", "terms": [t.spec() for t in self.terms]}


class Compose(BernsteinFn):
    """``outer(inner(z))``; no Lévy triple is synthesised."""

    kind = "compose"

    def __init__(self, outer, inner):
        if not (isinstance(outer, BernsteinFn) and isinstance(inner, BernsteinFn)):
            raise SpecError("composition operands must be Bernstein functions")
        self.outer = outer
        self.inner = inner

    def _eval(self, z):
        return self.outer._eval(self.inner._eval(z))

    def _extend(self, z):
        return self.outer._extend(self.inner._extend(z))

    def _deriv(self, z, k):
        w = self.inner._eval(z)
        i1 = self.inner._deriv(z, 1)
        o1 = self.outer._deriv(w, 1)
        if k == 1:
            return o1 * i1
        i2 = self.inner._deriv(z, 2)
        o2 = self.outer._deriv(w, 2)
        if k == 2:
            return o2 * i1 ** 2 + o1 * i2
        i3 = self.inner._deriv(z, 3)
        o3 = self.outer._deriv(w, 3)
        return o3 * i1 ** 3 + 3.0 * o2 * i1 * i2 + o1 * i3

    def spec(self):
        return {"kind": "compose", "outer": self.outer.spec(), "inner": self.inner.spec()}


class StieltjesCBF(BernsteinFn):
    """Complete Bernstein function ``a + b l + int l/(l+s) sigma(ds)``.

    Evaluates on the whole slit plane.  ``levy`` optionally supplies the
    Lévy measure so the Hille-Phillips calculus and the associated function
    are available too.
    """

    kind = "stieltjes"

    def __init__(self, a=0.0, b=0.0, sigma=EMPTY, levy=None, spec=None):
        if a < 0 or b < 0:
            raise SpecError("Stieltjes triple needs a, b >= 0")
        self.a = float(a)
        self.b = float(b)
        self.sigma = sigma
        if not sigma.is_zero:
            sigma.stieltjes_mass()
        self.levy = levy
        self._spec = spec

    def __call__(self, z):
        zz = _as_complex(z)
        _check_slit(zz)
        return _out(self._eval(zz), z)

    def derivative(self, z, k=1):
        _check_order(k)
        zz = _as_complex(z)
        _check_slit(zz)
        return _out(self._deriv(zz, k), z)

    def _extend(self, z):
        return self._eval(z)

    def _eval(self, z):
        val = self.a + self.b * z
        if self.sigma.is_zero:
            return val
        flat = z.ravel()
        lo = float(np.min(np.abs(flat)))
        hi = float(np.max(np.abs(flat)))
        far = Far(_FAR_FACTOR * max(hi, 1.0), 0.0, flat, -flat ** 2)
        integral = self.sigma.integrate(lambda s: flat[None, :] / (flat[None, :] + s[:, None]),
                                        far=far, vanish=0, scale=1.0 / max(lo, 1e-300),
                                        poles=_near_cut(-flat))
        return val + np.reshape(integral, z.shape)

    def _deriv(self, z, k):
        val = np.full(z.shape, self.b if k == 1 else 0.0, dtype=complex)
        if self.sigma.is_zero:
            return val
        flat = z.ravel()
        lo = float(np.min(np.abs(flat)))
        hi = float(np.max(np.abs(flat)))
        # d^k/dl^k [l/(l+s)] = (-1)^(k+1) k! s / (l+s)^(k+1)
        sign = (-1) ** (k + 1) * math.factorial(k)
        # large s: s/(l+s)^(k+1) = s^-k (1 - (k+1) l/s + ...)
        k_m1 = float(sign) if k == 1 else 0.0
        k_m2 = -2.0 * sign * flat if k == 1 else (float(sign) if k == 2 else 0.0)
        far = Far(_FAR_FACTOR * max(hi, 1.0), 0.0, k_m1, k_m2)
        integral = self.sigma.integrate(
            lambda s: sign * s[:, None] / (flat[None, :] + s[:, None]) ** (k + 1),
            far=far, vanish=0, scale=1.0 / max(lo, 1e-300), poles=_near_cut(-flat))
        return val + np.reshape(integral, z.shape)

    def stieltjes(self):
        return self.a, self.b, self.sigma

    def triple(self):
        if self.levy is None:
            raise UnsupportedRepresentation("Stieltjes triple given without a Lévy measure")
        return self.a, self.b, self.levy

    def spec(self):
        if self._spec is not None:
            return dict(self._spec)
        return {"kind": "stieltjes", "a": self.a, "b": self.b,
                "atoms": [list(x) for x in self.sigma.atoms]}


def ratio_cbf(c=1.0):
    """``z/(z+c)``: sigma = delta_c, Lévy density ``c exp(-c s)``."""
    c = float(c)
    return StieltjesCBF(0.0, 0.0, RadonMeasure.dirac(c, 1.0),
                        levy=RadonMeasure.power_exp(0.0, None, c, 0.0, c),
                        spec={"kind": "ratio", "c": c})


def exp_e1(x):
    """``exp(x) E1(x)`` without overflow (continued fraction for large x)."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    big = (np.abs(x) > 20.0) & (x.real > 0)
    small = ~big
    if np.any(small):
        xs = x[small]
        out[small] = _exp1(xs) * np.exp(xs)
    if np.any(big):
        xb = x[big]
        # e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- 9/(x+7- ...))))
        acc = xb + 61.0
        for n in range(30, 0, -1):
            acc = xb + (2 * n - 1) - n * n / acc
        out[big] = 1.0 / acc
    return out


_SERIES_SWITCH = 60.0
_SERIES_TERMS = 30


def _power_series(coef, lam, k):
    """k-th derivative of ``sum_m coef[m-1] * lam**m`` (m = 1..len(coef))."""
    out = np.zeros(lam.shape, dtype=complex)
    for m in range(len(coef), 0, -1):
        if m < k:
            break
        fall = 1.0
        for j in range(k):
            fall *= m - j
        out = out + coef[m - 1] * fall * lam ** (m - k)
    return out


def _exp_tail_series(K, c, kind):
    """Small-l expansion coefficients of the exponential-tail contributions."""
    m = np.arange(1, _SERIES_TERMS + 1)
    fact = np.array([math.factorial(int(j)) for j in m], dtype=float)
    base = K * (-1.0) ** (m + 1) / c ** (m + 1)
    if kind == "phi":
        return base * fact
    return base * (1.0 - fact)  # psi - phi


def _defect_atoms(lam, nu):
    x = np.array([p for p, _ in nu.atoms])
    m = np.array([w for _, w in nu.atoms])
    return delta(np.outer(lam, x)) @ m


class AssociatedCBF:
    """``phi(l) = a + b l + int l s/(1+l s) nu(ds)`` for a Lévy triple ``(a, b, nu)``.

    Equals ``l**-1 * (Laplace transform of psi)(1/l)``; defined on the slit
    plane.  Atoms and exponential tails ``K exp(-c s)`` on ``(0, inf)`` are
    handled in closed form; everything else by quadrature.  ``closed`` can
    supply exact ``(value, derivative, defect)`` callables for primitives.
    """

    def __init__(self, a, b, nu, closed=None):
        self.a = float(a)
        self.b = float(b)
        self.nu = nu
        self.closed = closed
        simple = tuple(t for t in nu.tails if t.start == 0.0 and t.q == 0.0)
        rest = tuple(t for t in nu.tails if t not in simple)
        self._exp_tails = simple
        self._quad = RadonMeasure(segments=nu.segments, tails=rest)

    def stieltjes(self):
        """Same function as a Stieltjes triple: sigma is nu pushed by ``s -> 1/s``."""
        atoms = tuple((1.0 / x, w) for x, w in self.nu.atoms)
        if self.nu.segments or self.nu.tails:
            raise UnsupportedRepresentation("push-forward only implemented for atomic measures")
        return self.a, self.b, RadonMeasure(atoms=atoms)

    def _integral(self, flat, kern, k_inf, k_m1, k_m2, vanish, growth=0, rates=None):
        lo = float(np.min(np.abs(flat)))
        hi = float(np.max(np.abs(flat)))
        far = Far(_FAR_FACTOR / max(min(lo, 1.0), 1e-300), k_inf, k_m1, k_m2)
        return self._quad.integrate(kern, far=far, vanish=vanish, growth=growth, scale=hi,
                                    poles=_near_cut(-1.0 / flat), rates=rates)

    @staticmethod
    def _tail_closed(flat, t, k):
        """Exponential tail ``K exp(-c s)``: value (k=0), derivatives, or defect (k='D')."""
        K, c = t.K, t.c
        x = c / flat
        series = np.abs(x) > _SERIES_SWITCH
        if np.any(series):
            out = np.empty(flat.shape, dtype=complex)
            rest = ~series
            if np.any(rest):
                part = AssociatedCBF._tail_closed(flat[rest], t, k)
                if part is None:
                    return None
                out[rest] = part
            if k == "D":
                out[series] = _power_series(_exp_tail_series(K, c, "D"), flat[series], 0)
            elif k in (0, 1, 2):
                out[series] = _power_series(_exp_tail_series(K, c, "phi"), flat[series], k)
            else:
                return None
            return out
        g = exp_e1(x)
        g1 = g - 1.0 / x
        if k == 0:
            return K / c - (K / flat) * g
        if k == 1:
            return K * (g / flat ** 2 + c * g1 / flat ** 3)
        if k == 2:
            g2 = g1 + 1.0 / x ** 2
            return -K * (2.0 * g / flat ** 3 + 4.0 * c * g1 / flat ** 4 + c * c * g2 / flat ** 5)
        if k == "D":
            return -K / (c + flat) + (K / flat) * g
        return None

    def __call__(self, lam):
        ll = _as_complex(lam)
        _check_slit(ll)
        if self.closed is not None:
            return _out(self.closed[0](ll), lam)
        flat = ll.ravel()
        val = self.a + self.b * flat
        if self.nu.atoms:
            x = np.array([p for p, _ in self.nu.atoms])
            m = np.array([w for _, w in self.nu.atoms])
            lx = np.outer(flat, x)
            val = val + (lx / (1.0 + lx)) @ m
        for t in self._exp_tails:
            val = val + self._tail_closed(flat, t, 0)
        if not self._quad.is_zero:
            val = val + self._integral(
                flat, lambda s: (flat[None, :] * s[:, None]) / (1.0 + flat[None, :] * s[:, None]),
                np.ones_like(flat), -1.0 / flat, 1.0 / flat ** 2, vanish=1)
        return _out(val.reshape(ll.shape), lam)

    def derivative(self, lam, k=1):
        _check_order(k)
        ll = _as_complex(lam)
        _check_slit(ll)
        if self.closed is not None:
            return _out(self.closed[1](ll, k), lam)
        flat = ll.ravel()
        val = np.full(flat.shape, self.b if k == 1 else 0.0, dtype=complex)
        sign = (-1) ** (k + 1) * math.factorial(k)
        if self.nu.atoms:
            x = np.array([p for p, _ in self.nu.atoms])
            m = np.array([w for _, w in self.nu.atoms])
            val = val + (sign * x[None, :] ** k / (1.0 + np.outer(flat, x)) ** (k + 1)) @ m
        quad = self._quad
        for t in self._exp_tails:
            part = self._tail_closed(flat, t, k)
            if part is None:
                quad = quad + RadonMeasure(tails=(t,))
            else:
                val = val + part
        if not quad.is_zero:
            # d^k/dl^k [l s/(1+l s)] = (-1)^(k+1) k! s^k / (1+l s)^(k+1)
            kern = lambda s: sign * s[:, None] ** k / (1.0 + flat[None, :] * s[:, None]) ** (k + 1)
            # large s: s^k/(1+l s)^(k+1) = l^-(k+1) s^-1 (1 - (k+1)/(l s) + ...)
            k_m1 = sign / flat ** (k + 1)
            k_m2 = -(k + 1) * sign / flat ** (k + 2)
            lo = float(np.min(np.abs(flat)))
            far = Far(_FAR_FACTOR / max(min(lo, 1.0), 1e-300), 0.0, k_m1, k_m2)
            val = val + quad.integrate(kern, far=far, vanish=1, growth=k,
                                       scale=float(np.max(np.abs(flat))),
                                       poles=_near_cut(-1.0 / flat))
        return _out(val.reshape(ll.shape), lam)

    def defect(self, lam):
        """``psi(l) - phi(l) = int Delta(l s) nu(ds)`` for ``Re l >= 0``."""
        ll = _as_complex(lam)
        _check_half_plane(ll)
        if self.closed is not None:
            return _out(self.closed[2](ll), lam)
        flat = ll.ravel()
        val = np.zeros(flat.shape, dtype=complex)
        if self.nu.atoms:
            val = val + _defect_atoms(flat, self.nu)
        for t in self._exp_tails:
            val = val + self._tail_closed(flat, t, "D")
        if not self._quad.is_zero:
            kern = lambda s: np.reshape(delta(np.outer(s, flat).ravel()), (s.size, flat.size))
            val = val + self._integral(flat, kern, 0.0, 1.0 / flat, -1.0 / flat ** 2,
                                       vanish=2, rates=flat)
        return _out(val.reshape(ll.shape), lam)


class PotentialFn:
    """``1/psi`` for a nonzero Bernstein function."""

    def __init__(self, psi):
        self.psi = psi

    def __call__(self, z):
        return 1.0 / self.psi(z)


def associated_cbf(psi):
    """Associated complete Bernstein function of ``psi`` (needs a Lévy triple)."""
    return psi.associated()


def delta(lam):
    """``1/(1+l) - exp(-l)``, accurate near 0."""
    ll = np.atleast_1d(_as_complex(lam))
    if np.any(ll.real < -_HALF_PLANE_SLACK):
        raise DomainError("delta needs Re l >= 0")
    small = np.abs(ll) < 1e-3
    out = 1.0 / (1.0 + ll) - np.exp(-ll)
    if np.any(small):
        x = ll[small]
        # Taylor series: sum_k (-1)^k x^k (1 - 1/k!)
        acc = np.zeros_like(x)
        fact = 1.0
        for k in range(2, 12):
            fact *= k
            acc += (-x) ** k * (1.0 - 1.0 / fact)
        out[small] = acc
    return _out(out.reshape(np.shape(lam)), lam)


def delta_bound(lam):
    """``4 |l|^2 / (1 + Re l)^3``."""
    ll = _as_complex(lam)
    val = 4.0 * np.abs(ll) ** 2 / (1.0 + ll.real) ** 3
    return float(val) if np.ndim(lam) == 0 else val


def resolvent_diff_scalar(psi, lam, z, phi=None):
    """``r(l; z) = 1/(z + psi(l)) - 1/(z + phi(l))`` with phi associated to psi."""
    if phi is None:
        phi = psi.associated()
    ll = _as_complex(lam)
    zz = _as_complex(z)
    return 1.0 / (zz + psi(ll)) - 1.0 / (zz + phi(ll))


# ---------------------------------------------------------------------------
# JSON specs


def _num(d, key, default=None):
    if key not in d:
        if default is None:
            raise SpecError("missing field %r" % key)
        return default
    v = d[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        raise SpecError("field %r must be a finite number" % key)
    return float(v)


def _measure_from(d):
    atoms = d.get("atoms", [])
    try:
        atoms = tuple((float(x), float(w)) for x, w in atoms)
    except (TypeError, ValueError):
        raise SpecError("atoms must be [[location, mass], ...]")
    mu = RadonMeasure(atoms=atoms)
    for seg in d.get("segments", []):
        if not isinstance(seg, dict):
            raise SpecError("segment entries must be objects")
        hi = seg.get("hi")
        mu = mu + RadonMeasure.power_exp(_num(seg, "lo", 0.0), hi, _num(seg, "k"),
                                         _num(seg, "q", 0.0), _num(seg, "c", 0.0))
    return mu


def from_spec(d):
    """Build a function from its JSON dictionary."""
    from .errors import AdmissibilityError

    if not isinstance(d, dict) or "kind" not in d:
        raise SpecError("function spec must be an object with a 'kind'")
    kind = d["kind"]
    try:
        if kind == "power":
            return Power(_num(d, "alpha"))
        if kind == "affine":
            return Affine(_num(d, "a", 0.0), _num(d, "b", 1.0))
        if kind == "log1p":
            return Log1p()
        if kind == "one_minus_exp":
            return OneMinusExp(_num(d, "c", 1.0), _num(d, "r", 1.0))
        if kind == "ratio":
            return ratio_cbf(_num(d, "c", 1.0))
        if kind == "levy":
            return LevyBernstein(_num(d, "a", 0.0), _num(d, "b", 0.0), _measure_from(d), spec=d)
        if kind == "stieltjes":
            return StieltjesCBF(_num(d, "a", 0.0), _num(d, "b", 0.0), _measure_from(d), spec=d)
        if kind == "sum":
            return Sum([from_spec(t) for t in d.get("terms", [])])
        if kind == "compose":
            return Compose(from_spec(d.get("outer")), from_spec(d.get("inner")))
    except AdmissibilityError as exc:
        raise SpecError(str(exc))
    raise SpecError("unknown function kind %r" % (kind,))
