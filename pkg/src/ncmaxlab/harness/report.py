"""Report emission: CSV rows, JSON summary, and plain matplotlib figures.

The CSV and JSON files are the determinism contract — identical configs
must reproduce them byte for byte, so floats are printed with repr-faithful
'%.17g' and JSON keys are sorted.  Figures are a convenience rendering of
the same rows (PNG bytes may legitimately vary across matplotlib builds;
use --no-figures where byte-stability of the whole directory matters).
"""

from __future__ import annotations

import csv
import json
import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from ncmaxlab.harness.config import ExperimentConfig  # noqa: E402
from ncmaxlab.harness.experiments import ExperimentResult  # noqa: E402


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return "nan"
    return str(v)


def write_csv(path: str, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])


def write_summary(path: str, summary: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _finite(values):
    return [v for v in values
            if isinstance(v, (int, float)) and math.isfinite(v)]


def render_figure(spec, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    payload = spec.payload
    if spec.kind == "scatter_loglog":
        x, y = _finite(payload["x"]), _finite(payload["y"])
        n = min(len(x), len(y))
        ax.loglog(x[:n], y[:n], ".", markersize=4)
        if payload.get("diagonal") and n:
            lo = min(min(x[:n]), min(y[:n]))
            hi = max(max(x[:n]), max(y[:n]))
            lo = max(lo, 1e-300)
            ax.loglog([lo, hi], [lo, hi], "k--", linewidth=0.8)
    elif spec.kind == "hist":
        values = _finite(payload["values"])
        if values:
            ax.hist(values, bins=min(30, max(5, len(values) // 4)))
        for v in payload.get("vlines", []):
            ax.axvline(v, color="k", linestyle="--", linewidth=0.8)
    elif spec.kind == "lines":
        x = payload["x"]
        for label, ys in payload["series"].items():
            ax.plot(x[:len(ys)], ys, marker="o", markersize=3, label=label)
        if payload.get("logx"):
            ax.set_xscale("log")
        if payload.get("logy"):
            ax.set_yscale("log")
        ax.legend(fontsize=8)
    else:
        raise ValueError(f"unknown figure kind {spec.kind!r}")
    ax.set_xlabel(payload.get("xlabel", ""))
    ax.set_ylabel(payload.get("ylabel", ""))
    ax.set_title(spec.name)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_report(cfg: ExperimentConfig, result: ExperimentResult) -> dict:
    """Emit CSV + JSON (+ PNGs unless disabled); returns written paths."""
    outdir = cfg.output
    os.makedirs(outdir, exist_ok=True)
    base = os.path.join(outdir, cfg.experiment)
    paths = {"csv": base + ".csv", "summary": base + "_summary.json"}
    write_csv(paths["csv"], result.columns, result.rows)
    summary = dict(result.summary)
    summary["config"] = cfg.to_jsonable()
    write_summary(paths["summary"], summary)
    if cfg.figures:
        figs = []
        for spec in result.figures:
            fp = f"{base}_{spec.name}.png"
            render_figure(spec, fp)
            figs.append(fp)
        paths["figures"] = figs
    return paths
