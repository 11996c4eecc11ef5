"""Chart rendering for qteleport CSV sweep files.

The renderer never computes physics: every plotted value comes from the CSV,
so identical input bytes always produce identical data series.
"""

from .cli import KINDS, PlotSpec, RenderError, load_rows, render

__all__ = ["KINDS", "PlotSpec", "RenderError", "load_rows", "render"]
