"""Rendering of result tables to figure files next to the CSV output."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_experiment(kind: str, rows: List[Dict], summary: Dict,
                    path: Path) -> Optional[Path]:
    """Render the figure for one experiment kind; returns the path or None
    when the kind has no figure."""
    fn = _PLOTTERS.get(kind)
    if fn is None or not rows:
        return None
    fig = fn(rows, summary)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _moments_figure(rows, summary):
    fig, ax = plt.subplots(figsize=(8, 3.2))
    labels = [r["pattern"] for r in rows]
    nsig = [r["n_sigma"] for r in rows]
    ax.bar(range(len(rows)), nsig, color=["tab:blue" if r["passed"] else "tab:red" for r in rows])
    ax.axhline(summary["gate_sigma"], color="k", ls="--", lw=1, label="gate")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("|MC - exact| / SE")
    ax.set_title(f"Haar moments, D={summary['dim']}, {summary['samples']} samples")
    ax.legend()
    return fig


def _purity_figure(rows, summary):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    N = [r["N"] for r in rows]
    ax.errorbar(N, [r["mc_purity"] for r in rows],
                yerr=[3 * r["std_error"] for r in rows], fmt="o", label="MC (3 SE)")
    ax.plot(N, [r["exact_purity"] for r in rows], "k--", label="exact average")
    ax.set_xlabel("N")
    ax.set_ylabel("mean first-qudit purity")
    ax.legend()
    return fig


def _decay_figure(rows, summary, key, label):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    N = [r["N"] for r in rows]
    vals = [r[key] for r in rows]
    ax.semilogy(N, vals, "o-", label="median")
    if "finite_size_scale" in rows[0]:
        ax.semilogy(N, [r["finite_size_scale"] for r in rows], "k--",
                    label="d^{-(N-3)/2}")
    ax.set_xlabel("N")
    ax.set_ylabel(label)
    ax.legend()
    return fig


def _overlap_figure(rows, summary):
    return _decay_figure(rows, summary, "median_overlap", "median cross overlap")


def _gram_figure(rows, summary):
    return _decay_figure(rows, summary, "median_gram_residual", "median Gram residual")


def _factorization_figure(rows, summary):
    return _decay_figure(rows, summary, "median_abs_error", "median |measured - predicted|")


def _fisher_figure(rows, summary):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.semilogy([r["frame"] for r in rows], [r["max_route_diff"] for r in rows], ".")
    ax.axhline(summary["gate"], color="k", ls="--", label="gate")
    ax.set_xlabel("frame")
    ax.set_ylabel("max |closed form - SLD route|")
    ax.legend()
    return fig


def _isometry_figure(rows, summary):
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.2))
    a = [r["anisotropy"] for r in rows]
    d = [r["theta_drift"] for r in rows]
    axes[0].hist(a, bins=15, alpha=0.8)
    axes[0].axvline(summary.get("anisotropy_max", 0.2), color="k", ls="--")
    axes[0].set_xlabel("anisotropy")
    axes[1].hist(d, bins=15, alpha=0.8, color="tab:orange")
    axes[1].axvline(summary.get("drift_max", 0.2), color="k", ls="--")
    axes[1].set_xlabel("theta drift")
    return fig


def _lowT_figure(rows, summary):
    fig, ax = plt.subplots(figsize=(4.2, 4))
    x = [r["anisotropy_full"] for r in rows]
    y = [r["anisotropy_shell"] for r in rows]
    ax.plot(x, y, "o", alpha=0.7)
    lim = max(max(x), max(y)) * 1.05
    ax.plot([0, lim], [0, lim], "k--", lw=1)
    ax.set_xlabel("anisotropy, full scrambling")
    ax.set_ylabel("anisotropy, narrow shell")
    ax.set_title(f"shell larger in {summary['fraction_shell_larger']:.0%} of pairs")
    return fig


def _typicality_figure(rows, summary):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    td = [r["trace_distance_to_gibbs"] for r in rows]
    ax.hist(td, bins=20, alpha=0.8)
    ax.axvline(summary["trace_distance_max"], color="k", ls="--", label="gate")
    ax.set_xlabel("trace distance to Gibbs comparator")
    ax.legend()
    return fig


_PLOTTERS = {
    "haar-moments": _moments_figure,
    "page-purity": _purity_figure,
    "cross-overlap": _overlap_figure,
    "components": _gram_figure,
    "factorization": _factorization_figure,
    "fisher": _fisher_figure,
    "isometry": _isometry_figure,
    "isometry-lowT": _lowT_figure,
    "typicality": _typicality_figure,
}
