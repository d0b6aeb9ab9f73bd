"""The three plot kinds. Each takes an input path and a PlotSpec and writes
one image file; the return value is the output path."""

from __future__ import annotations

import numpy as np
from matplotlib import colors

from . import io, style
from .spec import PlotSpec


def plot_regret(aggregate_csv: str, spec: PlotSpec) -> str:
    """One curve per policy with a shaded uncertainty band."""
    series = io.read_aggregate(aggregate_csv)
    fig, ax = style.new_figure()
    for i, (name, data) in enumerate(sorted(series.items())):
        color = style.series_color(name, i)
        x = data["checkpoint"]
        if spec.band == "stderr":
            lo, hi = data["mean"] - data["stderr"], data["mean"] + data["stderr"]
        else:
            lo, hi = data["q_lo"], data["q_hi"]
        if len(x) == 1:
            yerr = np.vstack((data["mean"] - lo, hi - data["mean"]))
            ax.errorbar(float(x[0]), float(data["mean"][0]), yerr=yerr,
                        fmt="o", color=color, label=name)
        else:
            ax.plot(x, data["mean"], color=color, label=name)
            ax.fill_between(x, lo, hi, color=color, alpha=style.BAND_ALPHA, linewidth=0)
    if spec.logx:
        ax.set_xscale("log")
    ax.set_xlabel(spec.xlabel or "step")
    ax.set_ylabel(spec.ylabel or "cumulative regret")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    style.save(fig, spec.output)
    return spec.output


def plot_heatmap(heatmap_csv: str, spec: PlotSpec) -> str:
    """Ratio grid on a diverging colormap centered at 1; blank cells stay blank."""
    mu1, mu2, grid = io.read_heatmap(heatmap_csv)
    masked = np.ma.masked_invalid(grid)
    finite = grid[np.isfinite(grid)]
    if finite.size:
        vmin = min(float(finite.min()), 1.0 - 1e-6)
        vmax = max(float(finite.max()), 1.0 + 1e-6)
    else:
        vmin, vmax = 1.0 - 1e-6, 1.0 + 1e-6
    norm = colors.TwoSlopeNorm(vcenter=1.0, vmin=vmin, vmax=vmax)
    fig, ax = style.new_figure()
    mesh = ax.pcolormesh(
        mu2, mu1, masked, cmap=style.HEATMAP_CMAP, norm=norm, shading="nearest"
    )
    fig.colorbar(mesh, ax=ax, label="bound ratio")
    ax.set_xlabel(spec.xlabel or "mu2")
    ax.set_ylabel(spec.ylabel or "mu1")
    if spec.title:
        ax.set_title(spec.title)
    style.save(fig, spec.output)
    return spec.output


def plot_bounds(bounds_json: str, spec: PlotSpec) -> str:
    """Per-arm [lower, upper] interval bars, one panel per context, with
    true-mean markers when ground truth is supplied."""
    data = io.read_bounds(bounds_json)
    truth = io.read_truth(spec.truth) if spec.truth else {}
    contexts = list(data)
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = f"banditlab-plots-{style.STYLE_VERSION}"
    fig, axes = plt.subplots(
        len(contexts), 1,
        figsize=(style.FIGSIZE[0], 2.4 * len(contexts)),
        dpi=style.DPI, squeeze=False,
    )
    for row, z in enumerate(contexts):
        ax = axes[row, 0]
        arms = data[z]
        xs = np.arange(1, len(arms) + 1)
        for x, arm in zip(xs, arms):
            lo, hi = arm["lower"], arm["upper"]
            if hi > lo:
                ax.vlines(x, lo, hi, color="#1f77b4", linewidth=3)
                ax.plot([x, x], [lo, hi], marker="_", markersize=10,
                        color="#1f77b4", linestyle="none")
            else:
                # degenerate interval renders as a tick
                ax.plot([x], [lo], marker="_", markersize=12, color="#1f77b4")
        if z in truth:
            ax.plot(xs[: len(truth[z])], truth[z], marker="o", linestyle="none",
                    color="#d62728", markersize=4, label="true mean")
            ax.legend(loc="lower left")
        ax.set_xticks(xs)
        ax.set_xlabel(spec.xlabel or "arm")
        ax.set_ylabel(spec.ylabel or "mean bounds")
        ax.set_title(spec.title or f"context {z}")
    fig.tight_layout()
    style.save(fig, spec.output)
    return spec.output


RENDERERS = {"regret": plot_regret, "heatmap": plot_heatmap, "bounds": plot_bounds}
