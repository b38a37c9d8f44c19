"""Majority dynamics on graphs and local certificates for predicting its outcome."""

from .dynamics import majority_step, orbit, parse_config, format_config
from .graph import Graph, build_graph, parse_graph

__version__ = "0.1.0"

__all__ = ["Graph", "build_graph", "parse_graph", "majority_step", "orbit", "parse_config", "format_config"]
