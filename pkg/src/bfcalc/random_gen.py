"""Seeded random Bernstein triples and sectorial matrices."""

import math

import numpy as np
from scipy.stats import unitary_group

from .bernstein import LevyBernstein
from .measures import RadonMeasure


def rng(seed):
    return np.random.default_rng(np.uint64(int(seed) % 2 ** 64))


def random_triple(gen, tail_prob=0.5):
    """``a, b`` uniform on [0, 1]; 1 to 4 atoms with log-uniform locations
    in [1e-2, 1e2] and masses in [1e-2, 1]; optionally an exponential tail
    ``K exp(-c s)`` on (0, inf)."""
    a = float(gen.uniform(0.0, 1.0))
    b = float(gen.uniform(0.0, 1.0))
    k = int(gen.integers(1, 5))
    locs = 10.0 ** gen.uniform(-2.0, 2.0, size=k)
    masses = gen.uniform(1e-2, 1.0, size=k)
    mu = RadonMeasure(atoms=tuple(zip(locs.tolist(), masses.tolist())))
    spec = {"kind": "levy", "a": a, "b": b, "atoms": [[float(x), float(w)] for x, w in zip(locs, masses)]}
    if gen.uniform() < tail_prob:
        K = float(gen.uniform(0.1, 1.0))
        c = float(10.0 ** gen.uniform(-1.0, 1.0))
        mu = mu + RadonMeasure.power_exp(0.0, None, K, 0.0, c)
        spec["segments"] = [{"lo": 0.0, "hi": None, "k": K, "q": 0.0, "c": c}]
    return LevyBernstein(a, b, mu, spec=spec)


def random_normal_matrix(gen, n, angle, r_lo=1e-1, r_hi=1e1):
    """``U diag(d) U*`` with ``|d|`` log-uniform in ``[r_lo, r_hi]`` and
    ``|arg d| <= angle``, ``U`` Haar-unitary."""
    mod = np.exp(gen.uniform(math.log(r_lo), math.log(r_hi), size=n))
    arg = gen.uniform(-angle, angle, size=n)
    d = mod * np.exp(1j * arg)
    if n == 1:
        return d.reshape(1, 1)
    U = unitary_group.rvs(n, random_state=gen)
    return (U * d[None, :]) @ U.conj().T


def random_sector_point(gen, angle, r_lo=1e-1, r_hi=1e1):
    r = math.exp(gen.uniform(math.log(r_lo), math.log(r_hi)))
    return r * complex(math.cos(t := gen.uniform(-angle, angle)), math.sin(t))


#: 2x2 non-normal fixtures with closed-form resolvents
NON_NORMAL_FIXTURES = {
    "jordan_shift": np.array([[1.0, 1.0], [0.0, 2.0]], dtype=complex),
    "jordan_block": np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex),
}


def upper_triangular_resolvent(A, z):
    """``(z + A)^-1`` for a 2x2 upper-triangular ``A`` in closed form."""
    p = z + A[0, 0]
    q = z + A[1, 1]
    return np.array([[1.0 / p, -A[0, 1] / (p * q)], [0.0, 1.0 / q]], dtype=complex)
