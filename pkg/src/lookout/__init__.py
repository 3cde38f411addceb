"""Explain anomalous nodes of time-evolving graphs with a small budget of pair plots."""

from .explainer import DEFAULT_BUDGET, PairPlotExplainer, detect_anomalies, rank_nodes
from .features import FEATURE_NAMES, FeatureMatrix, TemporalFeatureExtractor, extract_features
from .iforest import ForestParams, IsolationForest
from .metrics import IncriminationReport, budget_sweep, incrimination, naive_select
from .scoring import PairPlotId, ScoreMatrix, enumerate_pairs, score_anomalies
from .selection import PlotSelection, greedy_select, marginal_gain, objective, partition_owners
from .tgraph import (
    AnomalySet,
    Edge,
    GraphFormatError,
    TGraph,
    load_anomalies,
    parse_edges,
    read_anomalies,
    read_edges,
)

__version__ = "0.1.0"

__all__ = [
    "AnomalySet",
    "DEFAULT_BUDGET",
    "Edge",
    "FEATURE_NAMES",
    "FeatureMatrix",
    "ForestParams",
    "GraphFormatError",
    "IncriminationReport",
    "IsolationForest",
    "PairPlotExplainer",
    "PairPlotId",
    "PlotSelection",
    "ScoreMatrix",
    "TGraph",
    "TemporalFeatureExtractor",
    "budget_sweep",
    "detect_anomalies",
    "enumerate_pairs",
    "extract_features",
    "greedy_select",
    "incrimination",
    "budget_sweep",
    "load_anomalies",
    "marginal_gain",
    "naive_select",
    "objective",
    "parse_edges",
    "partition_owners",
    "rank_nodes",
    "read_anomalies",
    "read_edges",
    "score_anomalies",
]
