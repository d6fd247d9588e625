"""Figure rendering for sweep curves and evaluation reports.

Uses the Agg backend so figures render headless; PNG metadata drops the
date stamp to keep repeated runs byte-identical.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .engine import EvaluationReport  # noqa: E402
from .thresholds import SweepResult  # noqa: E402


def _save(fig, path: str):
    kwargs = {"dpi": 150, "bbox_inches": "tight"}
    if path.endswith(".png"):
        kwargs["metadata"] = {"Date": None}
    fig.savefig(path, **kwargs)
    plt.close(fig)


def plot_sweep(result: SweepResult, path: str, title: str | None = None):
    rows = [r for r in result.rows if r.tie == 0.0]
    thetas = [r.theta for r in rows]
    ratios = [r.ratio for r in rows]
    gamblers = [r.gambler for r in rows]
    fig, (ax, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax.plot(thetas, ratios, lw=1.0, color="tab:blue")
    ax.axhline(result.best.ratio, color="tab:red", ls=":", lw=0.8)
    ax.plot([result.best.theta], [result.best.ratio], "o", color="tab:red", ms=4)
    ax.annotate(
        f"best ratio {result.best.ratio:.6f}\ntheta {result.best.theta:.6g}",
        xy=(result.best.theta, result.best.ratio),
        xytext=(6, -12),
        textcoords="offset points",
        fontsize=8,
    )
    ax.set_ylabel("gambler / prophet")
    if title:
        ax.set_title(title)
    ax2.plot(thetas, gamblers, lw=1.0, color="tab:green", label="gambler")
    ax2.axhline(result.prophet, color="tab:gray", ls="--", lw=0.8, label="prophet")
    ax2.set_xlabel("threshold theta (tie = 0 rows)")
    ax2.set_ylabel("expected value")
    ax2.legend(fontsize=8)
    _save(fig, path)


def plot_report(report: EvaluationReport, path: str, title: str | None = None):
    n = len(report.q_i)
    idx = range(1, n + 1)
    fig, (ax, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax.bar(idx, report.c_i, color="tab:blue", alpha=0.8)
    ax.axhline(math.sqrt(report.q), color="tab:red", ls="--", lw=0.9, label="sqrt(1 - p)")
    ax.set_ylabel("c_i (still running at i)")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    ax2.bar(idx, report.q_i, color="tab:orange", alpha=0.8)
    ax2.set_xlabel("index i")
    ax2.set_ylabel("q_i = Pr(miss at i)")
    _save(fig, path)
