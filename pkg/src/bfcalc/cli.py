"""``bfcalc`` command line: run suites and turn reports into plot data.

Exit codes: 0 all checks pass, 1 some check failed, 2 invalid input,
3 internal quadrature failure (the failing check is in the report).
"""

import argparse
import json
import logging
import sys

from .errors import DomainError, SpecError
from .plotting import KINDS, emit_plotdata
from .suites import SUITES, SuiteConfig, load_report, run_suite

log = logging.getLogger("bfcalc")


def _parser():
    p = argparse.ArgumentParser(prog="bfcalc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a named suite and write its JSON report")
    run.add_argument("--suite", choices=SUITES)
    run.add_argument("--seed", type=int)
    run.add_argument("--config", help="JSON config document")
    run.add_argument("--out", help="report path (default: stdout)")
    run.add_argument("--tol-scale", type=float, dest="tol_scale")
    plot = sub.add_parser("plot", help="emit CSV and PNG plot data from a report")
    plot.add_argument("--report", required=True)
    plot.add_argument("--kind", required=True, help="one of: %s" % ", ".join(KINDS))
    plot.add_argument("--out", required=True, help="CSV path; the PNG goes next to it")
    return p


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise SpecError("cannot read config %s: %s" % (path, exc))


def _run(args):
    cfg = SuiteConfig.from_dict(_load_config(args.config), suite=args.suite, seed=args.seed,
                                tol_scale=args.tol_scale)
    report = run_suite(cfg)
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    s = report.summary
    log.info("%s: %d pass, %d fail, worst margin %s, %.1f s", cfg.suite, s["pass"], s["fail"],
             s["worst_margin"], report.wall_clock)
    return report.exit_code


def _plot(args):
    try:
        report = load_report(args.report)
    except (OSError, ValueError) as exc:
        raise SpecError("cannot read report %s: %s" % (args.report, exc))
    csv_path, png_path = emit_plotdata(report, args.kind, args.out)
    log.info("wrote %s and %s", csv_path, png_path)
    return 0


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return _run(args) if args.command == "run" else _plot(args)
    except (SpecError, DomainError) as exc:
        print("bfcalc: error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
