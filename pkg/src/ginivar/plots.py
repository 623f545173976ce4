"""Matplotlib rendering of analysis results to image files.

Every figure-producing CLI path calls one of these; they are deliberately
plain (single Agg figure, default style, tight layout) so the files drop
into notebooks or reports without further processing.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .changepoint import ChangePointSet
from .montecarlo import ExperimentReport
from .series import TimeSeries
from .vartest import TestResult

__all__ = [
    "render_test_result",
    "render_changepoints",
    "render_series",
    "render_experiments",
]


def render_test_result(x: TimeSeries, result: TestResult, path: str) -> None:
    """Series with block boundaries on top, log local variances below."""
    p = result.partition
    fig, (ax_top, ax_bot) = plt.subplots(
        2, 1, figsize=(9, 6), sharex=True, height_ratios=[2, 1]
    )
    t = np.arange(1, x.n + 1)
    ax_top.plot(t, x.values, lw=0.6, color="#1f77b4")
    for j in range(1, p.block_count):
        ax_top.axvline(j * p.block_len + 0.5, color="0.85", lw=0.6, zorder=0)
    ax_top.set_ylabel("value")
    ax_top.set_title(
        f"U={result.u_stat:.4f}  T={result.t_stat:.3f}  p={result.p_value:.4f}  "
        f"{'reject' if result.reject else 'no rejection'} at alpha={result.alpha:g}"
    )
    centers = (np.arange(p.block_count) + 0.5) * p.block_len
    ax_bot.step(centers, result.block_stats.log_local_vars, where="mid", color="#d62728")
    ax_bot.axhline(
        float(np.mean(result.block_stats.log_local_vars)), color="0.6", lw=0.8, ls="--"
    )
    ax_bot.set_xlabel("t")
    ax_bot.set_ylabel("log local var")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_changepoints(x: TimeSeries, cps: ChangePointSet, path: str) -> None:
    """Series with vertical lines at the located change points."""
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(np.arange(1, x.n + 1), x.values, lw=0.6, color="#1f77b4")
    for p in cps.points:
        ax.axvline(p.index + 0.5, color="#2ca02c", lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("value")
    ax.set_title(f"{len(cps.points)} variance change point(s)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_series(x: TimeSeries, path: str, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(np.arange(1, x.n + 1), x.values, lw=0.6, color="#1f77b4")
    ax.set_xlabel("t")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_experiments(reports: list[ExperimentReport], path: str) -> None:
    """Bar chart of rejection rates (or bias for LRV cells) with 95% bands."""
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(reports)), 4))
    labels = []
    for i, r in enumerate(reports):
        alt = r.alternative or ("-" if r.mode != "lrv_quality" else "lrv")
        labels.append(f"{r.dgp}\nn={r.n} {alt}")
        if r.mode == "lrv_quality":
            ax.bar(i, r.bias, color="#ff7f0e")
            ax.errorbar(i, r.bias, yerr=r.rmse, fmt="none", ecolor="0.3", capsize=3)
        else:
            ax.bar(i, r.rejection_rate, color="#1f77b4")
            ax.errorbar(
                i,
                r.rejection_rate,
                yerr=1.96 * (r.mc_stderr or 0.0),
                fmt="none",
                ecolor="0.3",
                capsize=3,
            )
    ax.axhline(reports[0].alpha, color="0.6", lw=0.8, ls="--")
    ax.set_xticks(range(len(reports)), labels, fontsize=7)
    ax.set_ylabel("rate / bias")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
