"""Plot data from suite reports: a CSV table plus a PNG rendering of it."""

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import SpecError  # noqa: E402

#: plot kind -> (report data key, CSV columns)
KINDS = {
    "margin-vs-|z|": ("margin_vs_abs_z", ("abs_z", "integral", "bound")),
    "ratio-table": ("ratio_table", ("r", "theta", "re_ratio", "im_ratio")),
    "density-profile": ("density_profile", ("t", "s", "value", "family")),
}
_ALIASES = {"margin-vs-abs-z": "margin-vs-|z|"}


def plot_rows(report, kind):
    """Rows of plot data for ``kind``, in the report's deterministic order."""
    kind = _ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise SpecError("unknown plot kind %r (choose from %s)" % (kind, ", ".join(KINDS)))
    key, cols = KINDS[kind]
    rows = report.get("data", {}).get(key)
    if not rows:
        suite = report.get("config", {}).get("suite", "?")
        raise SpecError("report of suite %s carries no %s data" % (suite, kind))
    return kind, cols, [[row.get(c) for c in cols] for row in rows]


def emit_plotdata(report, kind, out):
    """Write the CSV for ``kind`` to ``out`` and a PNG next to it.

    Returns ``(csv_path, png_path)``.
    """
    kind, cols, rows = plot_rows(report, kind)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    png = os.path.splitext(out)[0] + ".png"
    _render(kind, rows, png)
    return out, png


def _render(kind, rows, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    if kind == "margin-vs-|z|":
        x = [r[0] for r in rows]
        ax.loglog(x, [r[1] for r in rows], "o", label="contour integral")
        ax.loglog(x, [r[2] for r in rows], "x", label="bound")
        ax.set_xlabel("|z|")
        ax.set_ylabel("value")
    elif kind == "ratio-table":
        for r0 in sorted({r[0] for r in rows}):
            sel = [r for r in rows if r[0] == r0]
            ax.plot([r[1] for r in sel], [r[2] for r in sel], "-o", ms=3, label="Re, r=%.3g" % r0)
            ax.plot([r[1] for r in sel], [r[3] for r in sel], "--", label="Im, r=%.3g" % r0)
        ax.set_xlabel("theta")
        ax.set_ylabel("psi(r e^{i theta}) / psi(r)")
    else:
        for key in sorted({(r[3], r[0]) for r in rows}):
            sel = [r for r in rows if (r[3], r[0]) == key]
            ax.loglog([r[1] for r in sel], [max(r[2], 1e-300) for r in sel],
                      label="%s, t=%g" % key)
        ax.set_xlabel("s")
        ax.set_ylabel("density")
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
