"""Named, seeded check suites with deterministic JSON reports.

A suite draws its random inputs from one ``numpy`` generator seeded by the
configuration, runs its checks in a fixed order and collects
:class:`~bfcalc.geometry.CheckReport` rows.  The JSON report is sorted by
check id and then sample index and never contains timings, so identical
configurations produce byte-identical files.
"""

from dataclasses import dataclass, field
import json
import math
import time

import numpy as np
from scipy.linalg import expm, fractional_matrix_power

from .bernstein import LevyBernstein, Log1p, OneMinusExp, Power, from_spec, ratio_cbf
from .bounds import SAMPLING_TOL, bound_suite
from .calculus import (eigen_oracle, hirsch_apply, levy_apply, resolvent,
                       resolvent_identity_residual)
from .cm import bernstein_test, cm_test, log_grid, ratio_power, root_transform, \
    root_transform_derivative
from .errors import BfcalcError, ConvergenceError, SpecError
from .geometry import CHECKS, CheckReport, SamplingPlan, check_inequality, contour_bound_check, \
    fujita_ratio_probe
from .measures import RadonMeasure
from .random_gen import (NON_NORMAL_FIXTURES, random_normal_matrix, random_sector_point,
                         random_triple, rng, upper_triangular_resolvent)
from .sectorial import make_sectorial, matrix_from_json
from .subordination import (GammaFamily, PoissonFamily, StableHalfFamily, compose_subordinator,
                            family_from_spec, semigroup_property_check, subordinate_matrix,
                            t1_diagnostic)

SCHEMA = "1"

SUITES = ("scalar-inequalities", "contour-bounds", "calculi-compat", "resolvent-identity",
          "sectoriality-constants", "subordination", "cm-appendix")

#: default sample counts per suite, overridable through ``samples`` in the config
DEFAULT_SAMPLES = {
    "scalar-inequalities": {"triples": 200, "radii": 64, "angles": 32},
    "contour-bounds": {"draws": 50},
    "calculi-compat": {"matrices": 30, "max_dim": 8},
    "resolvent-identity": {"cases": 30, "points": 8, "max_dim": 8},
    "sectoriality-constants": {"matrices": 20, "max_dim": 6},
    "subordination": {"matrices": 5, "max_dim": 4},
    "cm-appendix": {"grid": 16, "order": 8},
}

_CONFIG_KEYS = {"suite", "seed", "samples", "tol_scale", "psi", "matrix", "family", "z"}


@dataclass
class SuiteConfig:
    suite: str
    seed: int = 0
    samples: dict = field(default_factory=dict)
    tol_scale: float = 1.0
    psi: dict = None
    matrix: list = None
    family: dict = None
    z: list = None

    def __post_init__(self):
        if self.suite not in SUITES:
            raise SpecError("unknown suite %r (choose from %s)" % (self.suite, ", ".join(SUITES)))
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise SpecError("seed must be an integer")
        if not (0 <= self.seed < 2 ** 64):
            raise SpecError("seed must fit in 64 bits")
        if not (isinstance(self.tol_scale, (int, float)) and self.tol_scale > 0):
            raise SpecError("tol_scale must be positive")
        merged = dict(DEFAULT_SAMPLES[self.suite])
        for k, v in dict(self.samples or {}).items():
            if k not in merged:
                raise SpecError("unknown sample count %r for suite %s" % (k, self.suite))
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise SpecError("sample count %r must be a positive integer" % k)
            merged[k] = v
        self.samples = merged

    @classmethod
    def from_dict(cls, d, **overrides):
        d = dict(d or {})
        unknown = set(d) - _CONFIG_KEYS
        if unknown:
            raise SpecError("unknown config keys: %s" % ", ".join(sorted(unknown)))
        d.update({k: v for k, v in overrides.items() if v is not None})
        if "suite" not in d:
            raise SpecError("config needs a suite")
        return cls(**d)

    def to_dict(self):
        out = {"suite": self.suite, "seed": self.seed, "samples": dict(sorted(self.samples.items())),
               "tol_scale": float(self.tol_scale)}
        for key in ("psi", "matrix", "family", "z"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        return out

    # parsed references ---------------------------------------------------
    def parsed_psi(self):
        return None if self.psi is None else from_spec(self.psi)

    def parsed_matrix(self):
        if self.matrix is None:
            return None
        try:
            return make_sectorial(matrix_from_json(self.matrix))
        except BfcalcError as exc:
            raise SpecError("matrix: %s" % exc)

    def parsed_family(self):
        return None if self.family is None else family_from_spec(self.family)

    def parsed_z(self):
        if self.z is None:
            return None
        try:
            return [complex(float(a), float(b)) for a, b in self.z]
        except (TypeError, ValueError):
            raise SpecError("z must be a list of [re, im] pairs")


@dataclass
class SuiteReport:
    config: dict
    checks: list
    data: dict
    wall_clock: float = 0.0
    internal_error: bool = False

    @property
    def summary(self):
        passed = sum(1 for c in self.checks if c["pass"])
        margins = [c["worst_margin"] for c in self.checks if c["worst_margin"] is not None]
        return {"pass": passed, "fail": len(self.checks) - passed,
                "worst_margin": min(margins) if margins else None}

    @property
    def passed(self):
        return not self.internal_error and all(c["pass"] for c in self.checks)

    @property
    def exit_code(self):
        if self.internal_error:
            return 3
        return 0 if self.passed else 1

    def to_dict(self):
        return {"schema": SCHEMA, "config": self.config, "summary": self.summary,
                "pass": self.passed, "checks": self.checks, "data": self.data}

    def to_json(self):
        return json.dumps(_clean(self.to_dict()), sort_keys=True, indent=1) + "\n"


def _clean(x):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    return x


class _Collector:
    """Accumulates check rows; quadrature failures become failed rows."""

    def __init__(self):
        self.rows = []
        self.internal_error = False

    def add(self, ident, index, fn):
        try:
            rep = fn()
        except ConvergenceError as exc:
            self.internal_error = True
            row = {"id": ident, "index": index, "samples": 0, "worst_margin": None,
                   "worst_point": {"lambda": None, "z": None}, "pass": False,
                   "error": "quadrature failure: %s" % exc}
            self.rows.append(row)
            return None
        row = rep.to_dict()
        row["id"] = ident
        row["index"] = index
        self.rows.append(row)
        return rep

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r["id"], r["index"]))


def _relerr(X, Y):
    return float(np.linalg.norm(X - Y, 2) / max(np.linalg.norm(Y, 2), 1e-300))


def _agreement(ident, X, Y, tol, **params):
    err = _relerr(X, Y)
    params["relative_error"] = err
    return CheckReport(ident, 1, -err, None, None, bool(err <= tol), tol, params=params)


def _random_dim(gen, max_dim):
    return int(gen.integers(1, max_dim + 1))


def _random_nonnormal(gen, n, angle, r_lo=0.3, r_hi=3.0):
    """``Q T Q*`` with ``T`` upper triangular carrying the spectrum."""
    mod = np.exp(gen.uniform(math.log(r_lo), math.log(r_hi), size=n))
    arg = gen.uniform(-angle, angle, size=n)
    T = np.diag(mod * np.exp(1j * arg))
    if n == 1:
        return T
    scale = np.sqrt(np.outer(mod, mod))
    off = 0.5 * scale * (gen.normal(size=(n, n)) + 1j * gen.normal(size=(n, n))) / math.sqrt(2)
    T = T + np.triu(off, 1)
    Q, _ = np.linalg.qr(gen.normal(size=(n, n)) + 1j * gen.normal(size=(n, n)))
    return Q @ T @ Q.conj().T


# ---------------------------------------------------------------------------
# the suites


def _scalar_inequalities(cfg, gen, col):
    n = cfg.samples["triples"]
    plan = SamplingPlan(n_radii=cfg.samples["radii"], n_angles=cfg.samples["angles"])
    tol = 1e-9 * cfg.tol_scale
    given = cfg.parsed_psi()
    for i in range(n):
        psi = given if given is not None else random_triple(gen)
        for ident in CHECKS:
            col.add(ident, i, lambda: check_inequality(ident, psi, plan, tol=tol))
    probe = given if given is not None else Log1p()
    rows = fujita_ratio_probe(probe, 0.0, np.linspace(0.0, 0.5 * math.pi, 7), np.geomspace(1e-2, 1e4, 7))
    return {"ratio_table": rows}


def _contour_bounds(cfg, gen, col):
    given = cfg.parsed_psi()
    rows = []
    for i in range(cfg.samples["draws"]):
        psi = given if given is not None else random_triple(gen)
        omega = float(gen.uniform(0.5 * math.pi + 0.05, math.pi - 0.1))
        beta = float(gen.uniform(0.05, 0.95) * (math.pi - omega))
        z = random_sector_point(gen, 0.95 * omega, 1e-2, 1e2)

        def run():
            res = contour_bound_check(psi, z, omega, beta)
            margin = (res.bound - res.integral) / res.bound
            rows.append({"abs_z": abs(z), "integral": res.integral, "bound": res.bound})
            return CheckReport("CONTOUR", 1, margin, None, z, res.passed, 1e-6, constant=res.bound,
                               params={"omega": omega, "beta": beta, "integral": res.integral,
                                       "tail": res.tail, "converged": float(res.converged)})

        col.add("CONTOUR", i, run)
    rows.sort(key=lambda r: (r["abs_z"], r["integral"]))
    return {"margin_vs_abs_z": rows}


_COMPAT_CBF = (("sqrt", lambda: Power(0.5)), ("log1p", Log1p))


def _calculi_compat(cfg, gen, col):
    tol = 1e-6 * cfg.tol_scale
    given = cfg.parsed_matrix()
    for i in range(cfg.samples["matrices"]):
        if given is not None:
            A = given
        else:
            A = make_sectorial(random_normal_matrix(gen, _random_dim(gen, cfg.samples["max_dim"]),
                                                    math.pi / 3))
        for name, make in _COMPAT_CBF:
            psi = make()
            ref = eigen_oracle(psi, A)
            col.add("HIRSCH/" + name, i, lambda: _agreement("HIRSCH/" + name, hirsch_apply(psi, A), ref, tol))
            col.add("LEVY/" + name, i, lambda: _agreement("LEVY/" + name, levy_apply(psi, A), ref, tol))
        psi = OneMinusExp()
        col.add("LEVY/one_minus_exp", i,
                lambda: _agreement("LEVY/one_minus_exp", levy_apply(psi, A), eigen_oracle(psi, A), tol))
        if given is not None:
            break
    return {}


def _residual_report(psi, A, z, tol):
    res = resolvent_identity_residual(psi, A, z)
    return CheckReport("SA1", 1, -res, None, z, bool(res <= tol), tol, params={"residual": res})


def _resolvent_identity(cfg, gen, col):
    tol = 1e-5 * cfg.tol_scale
    npts = cfg.samples["points"]
    psi_given, A_given, z_given = cfg.parsed_psi(), cfg.parsed_matrix(), cfg.parsed_z()
    if A_given is not None or psi_given is not None:
        psi = psi_given if psi_given is not None else OneMinusExp()
        A = A_given if A_given is not None else make_sectorial(np.diag([1.0, 2.0]))
        zs = z_given or [1.0 + 0j]
        for k, z in enumerate(zs):
            col.add("SA1", k, lambda: _residual_report(psi, A, z, tol))
        return {}
    for i in range(cfg.samples["cases"]):
        psi = random_triple(gen)
        A = make_sectorial(random_normal_matrix(gen, _random_dim(gen, cfg.samples["max_dim"]),
                                                math.pi / 3))
        for k in range(npts):
            z = random_sector_point(gen, 0.6 * math.pi, 1e-1, 1e1)
            col.add("SA1", i * npts + k, lambda: _residual_report(psi, A, z, tol))
    z = complex(math.cos(math.pi / 3), math.sin(math.pi / 3))
    for j, (name, M) in enumerate(sorted(NON_NORMAL_FIXTURES.items())):
        A = make_sectorial(M)
        col.add("SA1-FIXTURE/" + name, 0, lambda: _residual_report(OneMinusExp(), A, z, tol))
        col.add("RESOLVENT-FIXTURE/" + name, 0,
                lambda: _agreement("RESOLVENT-FIXTURE/" + name, resolvent(M, z),
                                   upper_triangular_resolvent(M, z), 1e-12 * cfg.tol_scale))
    return {}


def _cbf_catalogue(gen):
    k = int(gen.integers(0, 3))
    if k == 0:
        return Power(float(gen.uniform(0.2, 0.9)))
    if k == 1:
        return Log1p()
    return ratio_cbf(float(10.0 ** gen.uniform(-1.0, 1.0)))


def _sectoriality_constants(cfg, gen, col):
    tol = SAMPLING_TOL * cfg.tol_scale
    psi_given, A_given = cfg.parsed_psi(), cfg.parsed_matrix()
    n = cfg.samples["matrices"]
    max_dim = cfg.samples["max_dim"]
    for suite in ("ZZZ", "MES0", "AEST", "AESA", "FRPOW1", "SUPG", "FPSI"):
        angle = math.pi / 6 if suite == "AESA" else math.pi / 3
        for i in range(n):
            dim = int(gen.integers(2, max_dim + 1))
            if A_given is not None:
                A = A_given
            elif i % 2:
                A = make_sectorial(_random_nonnormal(gen, dim, angle))
            else:
                A = make_sectorial(random_normal_matrix(gen, dim, angle, 0.3, 3.0))
            params = {}
            if suite == "ZZZ":
                r = float(gen.uniform(0.1, 0.9))
                params = {"r": r, "gamma": float(gen.uniform(0.2, 0.8) * (1.0 - r) * math.pi)}
            if psi_given is not None:
                psi = psi_given
            elif suite in ("AEST", "FRPOW1"):
                psi = _cbf_catalogue(gen)
            else:
                psi = random_triple(gen)
            stol = tol if suite != "FPSI" else 1e-8 * cfg.tol_scale
            extra = {"id_tol": stol} if suite == "FPSI" else {}
            col.add(suite, i, lambda: bound_suite(psi, A, suite, tol=stol, **params, **extra))
    return {}


_FAMILIES = (("gamma", GammaFamily), ("stable_half", StableHalfFamily),
             ("poisson", lambda: PoissonFamily(1.0)))
_LAPLACE_TS = (0.05, 0.5, 1.0, 2.0, 5.0)
_LAPLACE_ZS = (0.0, 0.3, 1.0, 4.0, 25.0, 1 + 2j, 5j, 0.1 + 20j)


def _laplace_report(fam, t, tol):
    zs = np.array(_LAPLACE_ZS, dtype=complex)
    dev = np.abs(fam.laplace(t, zs) - fam.exact_laplace(t, zs))
    k = int(np.argmax(dev))
    return CheckReport("LAPLACE", zs.size, -float(dev[k]), None, complex(zs[k]),
                       bool(dev[k] <= tol), tol, params={"t": t})


def _mass_report(fam, t, tol):
    dev = abs(fam.mass(t) - 1.0)
    return CheckReport("MASS", 1, -dev, None, None, bool(dev <= tol), tol, params={"t": t})


def _t1_report(fam):
    table = t1_diagnostic(fam, k=8)
    vals = [v for _, v in table.rows]
    return CheckReport("T1", len(vals), 0.0 if table.bounded else -1.0, None, None, table.bounded,
                       0.0, params={"t_norm_at_1": vals[0], "t_norm_at_min_t": vals[-1],
                                    "t_norm_max": max(vals)}), table


def _subordination(cfg, gen, col):
    tol = cfg.tol_scale
    given = cfg.parsed_family()
    fams = [(given.name, lambda: given)] if given is not None else list(_FAMILIES)
    data = {"density_profile": [], "t1": {}}
    mats = [make_sectorial(random_normal_matrix(gen, _random_dim(gen, cfg.samples["max_dim"]),
                                                math.pi / 3))
            for _ in range(cfg.samples["matrices"])]
    for name, make in fams:
        fam = make()
        for j, t in enumerate(_LAPLACE_TS):
            col.add("LAPLACE/" + name, j, lambda: _laplace_report(fam, t, 1e-7 * tol))
            col.add("MASS/" + name, j, lambda: _mass_report(fam, t, 1e-9 * tol))
        zs = np.array([0.0, 1.0, 1j, 2 + 3j])
        col.add("SEMIGROUP/" + name, 0,
                lambda: semigroup_property_check(fam, 0.7, 1.3, zs,
                                                 tol=(1e-12 if name == "poisson" else 1e-8) * tol))
        if name not in dict(_FAMILIES):
            continue
        psi = fam.psi()
        for i, A in enumerate(mats):
            for j, t in enumerate((0.5, 2.0)):
                ref = expm(-t * levy_apply(psi, A))
                col.add("SUBORD/" + name, 2 * i + j,
                        lambda: _agreement("SUBORD/" + name, subordinate_matrix(fam, A, t), ref,
                                           1e-6 * tol, t=t))
        rep = {}
        col.add("T1/" + name, 0, lambda: rep.setdefault("r", _t1_report(fam))[0])
        if "r" in rep:
            data["t1"][name] = rep["r"][1].to_dict()
        if name in ("gamma", "stable_half"):
            t = 0.5 if name == "gamma" else 1.0
            for s in np.geomspace(1e-3, 1e2, 26):
                data["density_profile"].append({"family": name, "t": t, "s": float(s),
                                                "value": float(fam.density(t, float(s)))})
    if given is None:
        gam = GammaFamily()
        ts = (0.5, 2.0)
        for i, A in enumerate(mats):
            for j, t in enumerate(ts):
                ref = eigen_oracle(lambda lam: (1.0 + lam) ** -t, A)
                col.add("GAMMA-ID", 2 * i + j,
                        lambda: _agreement("GAMMA-ID", subordinate_matrix(gam, A, t), ref, 1e-8 * tol, t=t))
        for k, (fname, M) in enumerate(sorted(NON_NORMAL_FIXTURES.items())):
            for j, t in enumerate(ts):
                ref = fractional_matrix_power(np.eye(2) + M, -t)
                col.add("GAMMA-ID-FIXTURE/" + fname, j,
                        lambda: _agreement("GAMMA-ID-FIXTURE/" + fname, subordinate_matrix(gam, M, t),
                                           ref, 1e-8 * tol, t=t))
        for k, (cname, outer, inner) in enumerate((("gamma_stable_half", GammaFamily(), StableHalfFamily()),
                                                   ("poisson_gamma", PoissonFamily(1.0), GammaFamily()))):
            def run():
                _, _, lrows = compose_subordinator(outer, inner, 1.0, [0.5, 1.0, 2.0], zs=(1.0, 0.5 + 1j))
                dev = max(abs(q - e) for _, q, e in lrows)
                return CheckReport("COMPOSE", len(lrows), -dev, None, None, bool(dev <= 1e-6 * tol),
                                   1e-6 * tol, params={"t": 1.0})
            col.add("COMPOSE/" + cname, 0, run)
    return data


def psi0():
    """``1 - (1+z)^-2``, the Lévy triple with density ``s exp(-s)``."""
    return LevyBernstein(0.0, 0.0, RadonMeasure.power_exp(0.0, None, 1.0, 1.0, 1.0),
                         spec={"kind": "levy", "a": 0.0, "b": 0.0,
                               "segments": [{"lo": 0.0, "hi": None, "k": 1.0, "q": 1.0, "c": 1.0}]})


def _cm_report(ident, verdict, points):
    margin = verdict.worst_margin if math.isfinite(verdict.worst_margin) else 0.0
    params = {}
    if verdict.violation:
        params = {"violation_x": verdict.violation[0], "violation_k": verdict.violation[1]}
    return CheckReport(ident, points * (verdict.order + 1), margin, None, None, verdict.consistent,
                       0.0, params=params)


def _cm_appendix(cfg, gen, col):
    grid = log_grid(1e-2, 1e2, cfg.samples["grid"])
    order = cfg.samples["order"]
    given = cfg.parsed_psi()
    catalogue = [("given", given)] if given is not None else [
        ("sqrt", Power(0.5)), ("log1p", Log1p()), ("ratio", ratio_cbf(1.0)),
        ("one_minus_exp", OneMinusExp()), ("psi0", psi0())]
    for name, psi in catalogue:
        for alpha in (0.25, 0.5):
            for beta in sorted({1.0, 1.0 / alpha - 1.0}):
                ident = "A1/%s/alpha=%g/beta=%g" % (name, alpha, beta)
                col.add(ident, 0, lambda: _cm_report(
                    ident, cm_test(ratio_power(psi, alpha, beta), order, grid), len(grid)))
            ident = "A3/%s/alpha=%g" % (name, alpha)
            col.add(ident, 0, lambda: _cm_report(
                ident, bernstein_test(root_transform(psi, alpha), order, grid), len(grid)))
    p0 = given if given is not None else psi0()
    for alpha in (0.3, 0.7, 0.9):
        ident = "A4/alpha=%g" % alpha
        col.add(ident, 0, lambda: _cm_report(
            ident, cm_test(root_transform_derivative(p0, alpha), order, grid), len(grid)))
    return {}


_RUNNERS = {
    "scalar-inequalities": _scalar_inequalities,
    "contour-bounds": _contour_bounds,
    "calculi-compat": _calculi_compat,
    "resolvent-identity": _resolvent_identity,
    "sectoriality-constants": _sectoriality_constants,
    "subordination": _subordination,
    "cm-appendix": _cm_appendix,
}


def validate(cfg):
    """Parse every spec reference up front so bad input fails before any work."""
    cfg.parsed_psi()
    cfg.parsed_matrix()
    cfg.parsed_family()
    cfg.parsed_z()


def run_suite(cfg):
    """Run the configured suite and return its :class:`SuiteReport`.

    Invalid specs raise :class:`~bfcalc.errors.SpecError` or
    :class:`~bfcalc.errors.DomainError` before any check runs.
    """
    if isinstance(cfg, dict):
        cfg = SuiteConfig.from_dict(cfg)
    validate(cfg)
    gen = rng(cfg.seed)
    col = _Collector()
    start = time.perf_counter()
    data = _RUNNERS[cfg.suite](cfg, gen, col)
    elapsed = time.perf_counter() - start
    return SuiteReport(cfg.to_dict(), col.sorted_rows(), _clean(data), elapsed, col.internal_error)


def load_report(path):
    with open(path) as fh:
        rep = json.load(fh)
    if not isinstance(rep, dict) or rep.get("schema") != SCHEMA:
        raise SpecError("%s is not a schema %s report" % (path, SCHEMA))
    return rep
