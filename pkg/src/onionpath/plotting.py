"""Static figure rendering for experiment outputs.

Figures are written straight to files next to the delimited output;
nothing opens a window. matplotlib is imported lazily so runs without
``--plot`` never pay for it.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

__all__ = ["plot_transfer_results", "plot_density_curve", "plot_degree_bars"]

STRATEGY_COLORS = {"rnd": "tab:red", "geo": "tab:green", "bw": "tab:orange", "grp": "tab:blue"}
STRATEGY_LABELS = {
    "rnd": "random",
    "geo": "geographical",
    "bw": "bandwidth",
    "grp": "latency graph",
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_transfer_results(result, outdir) -> list[Path]:
    """One avg-transfer-time-vs-circuit-length figure per page size."""
    plt = _pyplot()
    outdir = Path(outdir)
    written = []
    cells = [c for c in result.cells if c.error is None]
    for page_kb in result.plan.page_sizes_kb:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for strategy in result.plan.strategies:
            points = sorted(
                (c.circuit_len, c.avg_s, c.std_s)
                for c in cells
                if c.strategy == strategy and c.page_kb == page_kb
            )
            if not points:
                continue
            lengths, avgs, stds = zip(*points)
            ax.errorbar(
                lengths, avgs, yerr=stds,
                marker="o", capsize=3,
                color=STRATEGY_COLORS.get(strategy),
                label=STRATEGY_LABELS.get(strategy, strategy),
            )
        ax.set_xlabel("circuit length")
        ax.set_ylabel("avg transfer time (s)")
        ax.set_title(f"page size {page_kb:g} KB")
        ax.set_xticks(list(result.plan.circuit_lengths))
        ax.grid(True, alpha=0.3)
        ax.legend()
        path = outdir / f"transfer_{int(page_kb):03d}kb.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    return written


def plot_density_curve(points: Sequence, path) -> Path:
    """Mean anonymity degree against analytical-graph density."""
    plt = _pyplot()
    path = Path(path)
    usable = [p for p in points if p.mean is not None]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(
        [p.density for p in usable],
        [p.mean for p in usable],
        yerr=[p.stderr for p in usable],
        marker="o", capsize=3, color="tab:blue",
    )
    ax.set_xlabel("graph density")
    ax.set_ylabel("mean anonymity degree")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_degree_bars(degrees, circuit_lengths: Sequence[int], path) -> Path:
    """Anonymity degree per strategy (latency-graph degree per length)."""
    plt = _pyplot()
    path = Path(path)
    labels = ["rnd", "geo", "bw"] + [f"grp d={length}" for length in sorted(degrees.grp)]
    values = [degrees.rnd, degrees.geo, degrees.bw.value] + [
        degrees.grp[length].value for length in sorted(degrees.grp)
    ]
    colors = (
        [STRATEGY_COLORS["rnd"], STRATEGY_COLORS["geo"], STRATEGY_COLORS["bw"]]
        + [STRATEGY_COLORS["grp"]] * len(degrees.grp)
    )
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.bar(labels, values, color=colors)
    ax.set_ylabel("anonymity degree")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, axis="y", alpha=0.3)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
