"""Visibility graphs of price series, their spanning trees, and allometric scaling."""

from .allometry import AllometryResult, FitError, choose_root, compute_ac, fit_eta, tree_eta
from .ingest import (PriceSeries, ReturnSeries, load_price_csv, load_series, log_returns,
                     prices_from_returns, random_subseries, read_series_csv, write_series_csv)
from .spanning import (DisconnectedGraphError, SpanningTree, max_spanning_tree,
                       min_spanning_tree, random_spanning_tree)
from .stats import RegressionReport, ols
from .synth import FbmSpec, SurrogateKind, gen_brownian, gen_fbm, make_surrogate
from .visibility import (VisibilityGraph, build_visibility_graph, build_visibility_graph_naive,
                         edge_weight, visible)

__version__ = "0.1.0"
