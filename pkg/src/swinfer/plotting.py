"""Figure rendering for the report paths: coverage/length panels for the
simulation study and log-log length curves for the scaling study.

Figures are written next to the CSV output; the CSV remains the primary
machine-readable artifact.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_sim_figure", "render_scaling_figure"]

plt.rcParams["figure.dpi"] = 150
plt.rcParams["savefig.bbox"] = "tight"

_METHOD_STYLE = {
    "finite": dict(color="tab:blue", marker="o", label="finite-sample"),
    "boot": dict(color="tab:orange", marker="s", label="bootstrap"),
    "hybrid": dict(color="tab:green", marker="^", label="hybrid"),
}


def _group(records, key):
    out = {}
    for rec in records:
        out.setdefault(key(rec), []).append(rec)
    return out


def render_sim_figure(records, level: float, out_base: Path) -> list[Path]:
    """One coverage panel and one mean-length panel per model; returns the
    written paths."""
    out_base = Path(out_base)
    paths = []
    for model, recs in sorted(_group(records, lambda r: r.model).items()):
        fig, (ax_cov, ax_len) = plt.subplots(1, 2, figsize=(9.0, 3.4))
        for method, mrecs in sorted(_group(recs, lambda r: r.method).items()):
            style = _METHOD_STYLE.get(method, dict(marker="x", label=method))
            by_n = _group(mrecs, lambda r: r.n)
            ns = sorted(by_n)
            cov = [np.mean([r.covered for r in by_n[n]]) for n in ns]
            mean_len = [np.mean([r.length for r in by_n[n]]) for n in ns]
            sd_len = [np.std([r.length for r in by_n[n]]) for n in ns]
            ax_cov.plot(ns, cov, **style)
            ax_len.errorbar(ns, mean_len, yerr=sd_len, capsize=2, **style)
        ax_cov.axhline(level, color="red", linestyle="--", linewidth=1)
        ax_cov.set_xlabel("n")
        ax_cov.set_ylabel("coverage")
        ax_cov.set_ylim(-0.02, 1.05)
        ax_cov.set_title(f"{model}: coverage")
        ax_len.set_xlabel("n")
        ax_len.set_ylabel("mean length")
        ax_len.set_title(f"{model}: length")
        ax_len.legend(fontsize=8)
        path = out_base.with_name(f"{out_base.stem}_{model}.png")
        fig.savefig(path)
        plt.close(fig)
        paths.append(path)
    return paths


def render_scaling_figure(slopes, model: str, out_base: Path) -> Path:
    """Log-log mean length against n, one curve per (r, Delta)."""
    out_base = Path(out_base)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for entry in slopes:
        label = f"r={entry['r']:g}, Δ={entry['Delta']:g} (slope {entry['slope']:.3f})"
        ax.loglog(entry["sizes"], entry["mean_lengths"], marker="o", label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("mean interval length")
    ax.set_title(f"{model}: length scaling")
    ax.legend(fontsize=7)
    path = out_base.with_name(f"{out_base.stem}_scaling.png")
    fig.savefig(path)
    plt.close(fig)
    return path
