"""Render banditlab experiment outputs as figures.

Three plot kinds, each a pure function of its input files: ``regret``
(aggregate regret curves with uncertainty bands), ``heatmap`` (bound-ratio
grids), and ``bounds`` (per-arm mean-bound interval bars). No statistics are
ever recomputed here; every number rendered exists verbatim in the inputs.
"""

__version__ = "0.1.0"

from .render import plot_bounds, plot_heatmap, plot_regret
from .spec import PlotSpec

__all__ = ["PlotSpec", "plot_bounds", "plot_heatmap", "plot_regret", "__version__"]
