"""Centralized style constants so figure regeneration is stable across releases."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE_VERSION = "1"

FIGSIZE = (6.4, 4.0)
DPI = 120

# One stable color per policy; anything unlisted cycles through FALLBACKS.
POLICY_COLORS = {
    "glue": "#d62728",
    "ucb": "#1f77b4",
    "b-ucb": "#17becf",
    "kl-ucb": "#9467bd",
    "b-kl-ucb": "#2ca02c",
    "ossb": "#ff7f0e",
}
FALLBACK_COLORS = ("#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")

HEATMAP_CMAP = "RdBu"  # red below the ratio-1 midpoint, blue above
BAND_ALPHA = 0.25


def series_color(name: str, index: int) -> str:
    base = name.split("@", 1)[0]
    if base in POLICY_COLORS:
        return POLICY_COLORS[base]
    return FALLBACK_COLORS[index % len(FALLBACK_COLORS)]


def new_figure():
    plt.rcParams["svg.hashsalt"] = f"banditlab-plots-{STYLE_VERSION}"
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    return fig, ax


def save(fig, path: str) -> None:
    """Write the figure; SVG gets a pinned hash salt and no creation date,
    so identical inputs yield identical bytes."""
    fig.savefig(path, bbox_inches="tight", metadata={"Date": None} if str(path).endswith(".svg") else None)
    import matplotlib.pyplot as plt

    plt.close(fig)
