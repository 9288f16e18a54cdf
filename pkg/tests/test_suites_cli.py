import csv
import json

import pytest

from bfcalc.cli import main
from bfcalc.errors import ConvergenceError, SpecError
from bfcalc.plotting import KINDS, emit_plotdata, plot_rows
from bfcalc.suites import SCHEMA, SUITES, SuiteConfig, _Collector, load_report, run_suite

TINY = {
    "scalar-inequalities": {"triples": 2, "radii": 8, "angles": 4},
    "contour-bounds": {"draws": 3},
    "calculi-compat": {"matrices": 2, "max_dim": 3},
    "resolvent-identity": {"cases": 1, "points": 2, "max_dim": 3},
    "sectoriality-constants": {"matrices": 2, "max_dim": 3},
    "subordination": {"matrices": 1, "max_dim": 2},
    "cm-appendix": {"grid": 6, "order": 6},
}


def tiny(suite, seed=7, **extra):
    return dict({"suite": suite, "seed": seed, "samples": TINY[suite]}, **extra)


@pytest.fixture(scope="module")
def reports():
    return {s: run_suite(tiny(s)) for s in SUITES}


@pytest.mark.parametrize("suite", SUITES)
def test_tiny_suites_pass(reports, suite):
    rep = reports[suite]
    assert rep.passed and rep.exit_code == 0
    d = json.loads(rep.to_json())
    assert d["schema"] == SCHEMA
    assert d["summary"]["pass"] == len(d["checks"]) and d["summary"]["fail"] == 0


@pytest.mark.parametrize("suite", ["scalar-inequalities", "contour-bounds", "cm-appendix"])
def test_tiny_suites_deterministic(reports, suite):
    assert run_suite(tiny(suite)).to_json() == reports[suite].to_json()


def test_report_order_and_no_clock(reports):
    d = json.loads(reports["sectoriality-constants"].to_json())
    keys = [(c["id"], c["index"]) for c in d["checks"]]
    assert keys == sorted(keys)
    assert "wall_clock" not in json.dumps(d)
    assert reports["sectoriality-constants"].wall_clock > 0


def test_seed_changes_report():
    a = run_suite(tiny("contour-bounds", seed=1)).to_json()
    b = run_suite(tiny("contour-bounds", seed=2)).to_json()
    assert a != b


def test_config_validation():
    with pytest.raises(SpecError, match=r"alpha out of \(0,1\]"):
        run_suite({"suite": "scalar-inequalities", "psi": {"kind": "power", "alpha": 1.5}})
    with pytest.raises(SpecError):
        SuiteConfig.from_dict({"suite": "nope"})
    with pytest.raises(SpecError):
        SuiteConfig.from_dict({"suite": "cm-appendix", "samples": {"bogus": 1}})
    with pytest.raises(SpecError):
        SuiteConfig.from_dict({"suite": "cm-appendix", "tol_scale": -1})
    cfg = SuiteConfig.from_dict({"suite": "cm-appendix", "seed": 3}, seed=None, tol_scale=2.0)
    assert cfg.seed == 3 and cfg.tol_scale == 2.0


def test_resolvent_identity_with_given_spec():
    rep = run_suite({"suite": "resolvent-identity", "seed": 0,
                     "psi": {"kind": "one_minus_exp"},
                     "matrix": [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]})
    (row,) = rep.checks
    assert row["pass"] and -row["worst_margin"] <= 1e-6


def test_collector_records_quadrature_failure():
    col = _Collector()

    def boom():
        raise ConvergenceError("no convergence", 1e-3)

    col.add("X", 0, boom)
    (row,) = col.sorted_rows()
    assert not row["pass"] and "error" in row and col.internal_error


def test_internal_error_exit_code(reports):
    rep = reports["cm-appendix"]
    rep.internal_error = True
    try:
        assert rep.exit_code == 3
    finally:
        rep.internal_error = False


# -- plot data -------------------------------------------------------------------------------


@pytest.mark.parametrize("kind,suite", [("margin-vs-|z|", "contour-bounds"),
                                        ("ratio-table", "scalar-inequalities"),
                                        ("density-profile", "subordination")])
def test_emit_plotdata(tmp_path, reports, kind, suite):
    report = json.loads(reports[suite].to_json())
    out = tmp_path / "plot.csv"
    csv_path, png_path = emit_plotdata(report, kind, str(out))
    with open(csv_path) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == KINDS[kind][1]
    assert len(rows) > 1
    with open(png_path, "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_density_profile_gamma_tail_decreasing(reports):
    report = json.loads(reports["subordination"].to_json())
    _, _, rows = plot_rows(report, "density-profile")
    tail = [r[2] for r in rows if r[3] == "gamma" and r[0] == 0.5]
    assert len(tail) > 3
    assert all(a > b for a, b in zip(tail, tail[1:]))


def test_plot_errors(reports):
    report = json.loads(reports["cm-appendix"].to_json())
    with pytest.raises(SpecError):
        plot_rows(report, "histogram")
    with pytest.raises(SpecError):
        plot_rows(report, "ratio-table")


# -- command line ----------------------------------------------------------------------------


def test_cli_run_and_plot(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"samples": TINY["contour-bounds"]}))
    out = tmp_path / "rep.json"
    assert main(["run", "--suite", "contour-bounds", "--seed", "5", "--config", str(cfg),
                 "--out", str(out)]) == 0
    rep = load_report(str(out))
    assert rep["config"]["seed"] == 5
    csv_out = tmp_path / "m.csv"
    assert main(["plot", "--report", str(out), "--kind", "margin-vs-|z|", "--out", str(csv_out)]) == 0
    assert csv_out.exists() and (tmp_path / "m.png").exists()
    assert main(["plot", "--report", str(out), "--kind", "nope", "--out", str(csv_out)]) == 2


def test_cli_invalid_spec(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"psi": {"kind": "power", "alpha": 1.5}}))
    assert main(["run", "--suite", "scalar-inequalities", "--config", str(cfg)]) == 2
    assert "alpha out of (0,1]" in capsys.readouterr().err
    assert main(["run", "--suite", "nope"]) == 2
    assert main(["run", "--suite", "cm-appendix", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_failing_check_exit_code(tmp_path):
    # tolerances scaled far below roundoff make the agreement checks fail
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"samples": TINY["calculi-compat"]}))
    out = tmp_path / "rep.json"
    code = main(["run", "--suite", "calculi-compat", "--config", str(cfg), "--tol-scale", "1e-12",
                 "--out", str(out)])
    assert code == 1
    assert load_report(str(out))["summary"]["fail"] > 0


def test_load_report_rejects_other_schema(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"schema": "0"}))
    with pytest.raises(SpecError):
        load_report(str(p))
