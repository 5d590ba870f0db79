"""Figure rendering for udw-cavity CSV artifacts."""

from .render import FigureSpec, load_grid, render_causality, render_heatmap

__version__ = "0.1.0"
