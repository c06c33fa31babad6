"""Figure rendering for mcsim BER sweep CSVs."""

from .render import PlotSpec, build_figure_data, load_records, render

__all__ = ["PlotSpec", "build_figure_data", "load_records", "render"]

__version__ = "0.1.0"
