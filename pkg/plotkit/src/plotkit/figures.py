"""Figure builders for the benchmark CSV and estimate-report JSON files.

Inputs are consumed strictly through the producer's file formats: the
benchmark CSV schema (sweep_var, sweep_value, estimator, trials, detected,
freq_mse, amp_mse, pd, order_success, mean_runtime_ms) and the estimate
report JSON ({order, components: [{A, phi, omega}], ...}).  MSE axes are
rendered in dB (10 log10); the CSVs stay in linear units.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

CSV_COLUMNS = ["sweep_var", "sweep_value", "estimator", "trials", "detected",
               "freq_mse", "amp_mse", "pd", "order_success", "mean_runtime_ms"]

KINDS = ("mse_vs_n", "mse_vs_snr", "pd", "order_success", "freq_scatter",
         "scene2d")

# pinned, version-stable style so renders are reproducible byte for byte
STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.markersize": 5,
}

_SERIES_STYLE = {
    "1bCLEAN": dict(color="#1f77b4", marker="o"),
    "1bRELAX": dict(color="#2ca02c", marker="s"),
    "1bMMRELAX": dict(color="#d62728", marker="^"),
}


class SchemaError(ValueError):
    """Input file does not match the expected schema."""


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    out: str
    log_x: bool = False
    marks: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; "
                              f"choices: {', '.join(KINDS)}")
        if not self.inputs:
            raise SchemaError("at least one input file is required")


def read_bench_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header "
                              f"{CSV_COLUMNS}")
        if header != CSV_COLUMNS:
            missing = [c for c in CSV_COLUMNS if c not in header]
            extra = [c for c in header if c not in CSV_COLUMNS]
            raise SchemaError(
                f"{path}: column mismatch (missing {missing or 'none'}, "
                f"unexpected {extra or 'none'})")
        rows = []
        for rec in reader:
            row = dict(zip(header, rec))
            for col in ("sweep_value", "freq_mse", "amp_mse", "pd",
                        "order_success", "mean_runtime_ms"):
                row[col] = float(row[col])
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_report_json(path) -> dict:
    with open(path) as fh:
        d = json.load(fh)
    if "components" not in d or "order" not in d:
        raise SchemaError(f"{path}: not an estimate report "
                          "(missing 'components'/'order')")
    for c in d["components"]:
        if not {"A", "phi", "omega"} <= set(c):
            raise SchemaError(f"{path}: component missing A/phi/omega")
    return d


def _db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else float("nan")


def _sweep_series(rows, sweep_var, path_hint):
    rows = [r for r in rows if r["sweep_var"] == sweep_var]
    if not rows:
        raise SchemaError(f"{path_hint}: no rows with sweep_var="
                          f"{sweep_var!r}")
    series = {}
    for r in rows:
        series.setdefault(r["estimator"], []).append(r)
    for rs in series.values():
        rs.sort(key=lambda r: r["sweep_value"])
    return series


def _sweep_label(sweep_var):
    return "N (samples)" if sweep_var == "n" else "SNR (dB)"


def _plot_mse(spec: FigureSpec, sweep_var: str):
    rows = []
    for p in spec.inputs:
        rows.extend(read_bench_csv(p))
    series = _sweep_series(rows, sweep_var, spec.inputs[0])
    fig, (ax_f, ax_a) = plt.subplots(2, 1, sharex=True,
                                     figsize=STYLE["figure.figsize"])
    for name, rs in sorted(series.items()):
        x = [r["sweep_value"] for r in rs]
        style = _SERIES_STYLE.get(name, {})
        ax_f.plot(x, [_db(r["freq_mse"]) for r in rs], label=name, **style)
        ax_a.plot(x, [_db(r["amp_mse"]) for r in rs], label=name, **style)
    ax_f.set_ylabel("frequency MSE (dB)")
    ax_a.set_ylabel("amplitude MSE (dB)")
    ax_a.set_xlabel(_sweep_label(sweep_var))
    if spec.log_x:
        ax_a.set_xscale("log", base=2 if sweep_var == "n" else 10)
    ax_f.legend(loc="best")
    fig.tight_layout()
    return fig


def _plot_rate(spec: FigureSpec, column: str, ylabel: str):
    rows = []
    for p in spec.inputs:
        rows.extend(read_bench_csv(p))
    sweep_var = rows[0]["sweep_var"]
    series = _sweep_series(rows, sweep_var, spec.inputs[0])
    fig, ax = plt.subplots(figsize=STYLE["figure.figsize"])
    for name, rs in sorted(series.items()):
        ax.plot([r["sweep_value"] for r in rs], [r[column] for r in rs],
                label=name, **_SERIES_STYLE.get(name, {}))
    ax.set_xlabel(_sweep_label(sweep_var))
    ax.set_ylabel(ylabel)
    ax.set_ylim(-0.02, 1.05)
    if spec.log_x:
        ax.set_xscale("log", base=2 if sweep_var == "n" else 10)
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def _plot_freq_scatter(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=STYLE["figure.figsize"])
    n_pts = 0
    for p in spec.inputs:
        rep = read_report_json(p)
        for c in rep["components"]:
            ax.plot(c["omega"], c["A"], ".", color="#1f77b4", alpha=0.6)
            n_pts += 1
    if n_pts == 0:
        raise SchemaError("no components found in the given reports")
    for w in spec.marks:
        ax.axvline(w, color="#d62728", linestyle="--", linewidth=1.0)
    ax.set_xlabel("frequency (rad/sample)")
    ax.set_ylabel("amplitude")
    fig.tight_layout()
    return fig


def _plot_scene2d(spec: FigureSpec):
    rep = read_report_json(spec.inputs[0])
    comps = rep["components"]
    if not comps:
        raise SchemaError(f"{spec.inputs[0]}: report has no components")
    for c in comps:
        if not isinstance(c["omega"], (list, tuple)) or len(c["omega"]) != 2:
            raise SchemaError(f"{spec.inputs[0]}: scene2d needs 2-D "
                              "components with omega = [w1, w2]")
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    amax = max(c["A"] for c in comps)
    for c in comps:
        ax.scatter(c["omega"][0], c["omega"][1],
                   s=20 + 180 * c["A"] / amax, color="#d62728", alpha=0.7)
    ax.set_xlim(0, 2 * math.pi)
    ax.set_ylim(0, 2 * math.pi)
    ax.set_xlabel("axis-1 frequency (rad/sample)")
    ax.set_ylabel("axis-2 frequency (rad/sample)")
    fig.tight_layout()
    return fig


_BUILDERS = {
    "mse_vs_n": lambda spec: _plot_mse(spec, "n"),
    "mse_vs_snr": lambda spec: _plot_mse(spec, "snr"),
    "pd": lambda spec: _plot_rate(spec, "pd", "detection probability"),
    "order_success": lambda spec: _plot_rate(spec, "order_success",
                                             "order success rate"),
    "freq_scatter": _plot_freq_scatter,
    "scene2d": _plot_scene2d,
}


def build_figure(spec: FigureSpec):
    """Validate inputs and build the matplotlib figure (not yet saved)."""
    with plt.rc_context(STYLE):
        return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec) -> str:
    """Render the figure to ``spec.out``.  Inputs are validated before
    anything is written, so a schema error leaves no output file."""
    fig = build_figure(spec)
    try:
        fig.savefig(spec.out, metadata={"Software": "plotkit"})
    finally:
        plt.close(fig)
    return str(Path(spec.out))
