"""Plot request description shared by the CLI and the render functions."""

from __future__ import annotations

from dataclasses import dataclass

PLOT_KINDS = ("regret", "heatmap", "bounds")
BAND_KINDS = ("stderr", "quantile")


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    output: str
    band: str = "stderr"
    logx: bool = False
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    truth: str | None = None  # optional ground-truth JSON for bounds plots

    def __post_init__(self) -> None:
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; expected one of {PLOT_KINDS}")
        if self.band not in BAND_KINDS:
            raise ValueError(f"unknown band kind {self.band!r}; expected one of {BAND_KINDS}")
