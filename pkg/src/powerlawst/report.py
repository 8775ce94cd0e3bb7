"""Figure rendering for the CLI ``report`` subcommand.

Each figure is written next to a CSV with the same stem, so the plotted data
always ships with the plot.  matplotlib is imported lazily with the Agg
backend; nothing here ever opens a window.
"""

from __future__ import annotations

import os

import numpy as np

from .cascade import EldredgeFit
from .hybrid import HybridPlan


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_times_report(fit: EldredgeFit, out_dir: str) -> list[str]:
    """Exact cascade times with the affine fit: CSV + PNG."""
    rs = sorted(fit.exact_times)
    times = [fit.exact_times[r] for r in rs]
    fitted = [fit.fit_intercept + fit.fit_slope * r for r in rs]

    csv_path = os.path.join(out_dir, "cascade_times.csv")
    lines = ["r,time,fitted"]
    for r, t, f in zip(rs, times, fitted):
        lines.append(f"{r},{_fmt(t)},{_fmt(f)}")
    with open(csv_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rs, times, "o", ms=3, label="exact cascade time")
    ax.plot(rs, fitted, "-", label=f"affine fit, slope {fit.fit_slope:.4g}")
    ax.axvspan(*fit.fit_window, alpha=0.12, color="gray", label="fit window")
    ax.set_xlabel("r (region edge)")
    ax.set_ylabel("GHZ time")
    ax.set_title(f"cascade time, alpha={fit.alpha:g}, d={fit.d}")
    ax.legend()
    fig.tight_layout()
    png_path = os.path.join(out_dir, "cascade_times.png")
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]


def write_hybrid_report(plan: HybridPlan, out_dir: str) -> list[str]:
    """Hybrid-vs-cascade comparison: CSV table + log-log PNG."""
    csv_path = os.path.join(out_dir, "hybrid.csv")
    lines = ["r,best_time,eldredge_time,best_split,depth"]
    for r, best, eld, split, depth in plan.rows():
        split_str = str(split) if split else "no-split"
        lines.append(f"{r},{_fmt(best)},{_fmt(eld)},{split_str},{depth}")
    with open(csv_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    rs = np.arange(2, plan.r_max + 1)
    eld = np.array(_eldredge_column(plan))
    best = plan.best_time[2 : plan.r_max + 1]

    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(rs, eld, "-", label="cascade only")
    ax.loglog(rs, best, "-", label="hybrid optimum")
    cross = plan.crossover()
    if cross is not None:
        ax.axvline(cross, color="k", ls=":", lw=1, label=f"crossover r*={cross}")
    onset = plan.depth_onset(2)
    if onset is not None:
        ax.axvline(onset, color="r", ls=":", lw=1, label=f"depth-2 onset {onset}")
    ax.set_xlabel("r (region edge)")
    ax.set_ylabel("GHZ time")
    ax.set_title(
        f"hybrid vs cascade, alpha={plan.alpha:g}, d={plan.d}, "
        f"{plan.merge_convention} merge"
    )
    ax.legend()
    fig.tight_layout()
    png_path = os.path.join(out_dir, "hybrid.png")
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]


def _eldredge_column(plan: HybridPlan) -> list[float]:
    from .cascade import eldredge_time

    return [eldredge_time(plan.base, r) for r in range(2, plan.r_max + 1)]


def write_m_report(plan: HybridPlan, out_dir: str) -> list[str]:
    """Optimal block count m = r / r1 at every split point: CSV + PNG."""
    rs, ms = [], []
    for r in range(2, plan.r_max + 1):
        s = int(plan.best_split[r])
        if s:
            rs.append(r)
            ms.append(r / s)

    csv_path = os.path.join(out_dir, "m_curve.csv")
    lines = ["r,m"]
    for r, m in zip(rs, ms):
        lines.append(f"{r},{_fmt(m)}")
    with open(csv_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    if rs:
        ax.loglog(rs, ms, ".", ms=2)
    ax.set_xlabel("r (region edge)")
    ax.set_ylabel("optimal m")
    ax.set_title(f"blocks per axis at the optimum, alpha={plan.alpha:g}, d={plan.d}")
    fig.tight_layout()
    png_path = os.path.join(out_dir, "m_curve.png")
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]


def write_report(fit: EldredgeFit, plan: HybridPlan, out_dir: str) -> list[str]:
    """Render the full report bundle; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    paths += write_times_report(fit, out_dir)
    paths += write_hybrid_report(plan, out_dir)
    paths += write_m_report(plan, out_dir)
    return paths
