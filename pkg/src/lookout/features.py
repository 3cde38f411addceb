"""Per-node relational and temporal features of a t-graph.

Twelve columns, in this fixed order (pair-plot indices depend on it):
degrees, value-weighted and repetition-weighted in/out weights, five
inter-arrival-time (IAT) statistics, and lifetime.

IAT statistics are taken over the gaps between consecutive timestamps of
all edges incident to a node, incoming and outgoing together; a self-loop
is one incident edge.  Nodes with fewer than two incident edges get zero
for every IAT statistic and for lifetime.  Variance is the population
variance and the median of an even-length gap list is the mean of the
two middle gaps.  For bipartite graphs the absent direction is all zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .tgraph import TGraph

FEATURE_NAMES = (
    "indegree",
    "outdegree",
    "inweight_v",
    "outweight_v",
    "inweight_r",
    "outweight_r",
    "iat_avg",
    "iat_var",
    "iat_min",
    "iat_median",
    "iat_max",
    "lifetime",
)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    values: np.ndarray
    node_ids: tuple[str, ...]
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        if self.values.shape != (len(self.node_ids), len(self.feature_names)):
            raise ValueError("feature matrix shape does not match its labels")
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.feature_names.index(name)]

    def to_csv(self, stream, delimiter: str = ",") -> None:
        stream.write(delimiter.join(("node",) + self.feature_names) + "\n")
        for node, row in zip(self.node_ids, self.values.tolist()):
            stream.write(delimiter.join([node] + [repr(x) for x in row]) + "\n")


def _distinct_neighbors(owner: np.ndarray, other: np.ndarray, n: int) -> np.ndarray:
    pairs = np.unique(owner * n + other)
    return np.bincount(pairs // n, minlength=n).astype(np.float64)


def extract_features(graph: TGraph) -> FeatureMatrix:
    n = graph.n
    src, dst, ts, val = graph.src, graph.dst, graph.ts, graph.val
    out = np.zeros((n, len(FEATURE_NAMES)))

    out[:, 0] = _distinct_neighbors(dst, src, n)
    out[:, 1] = _distinct_neighbors(src, dst, n)
    out[:, 2] = np.bincount(dst, weights=val, minlength=n)
    out[:, 3] = np.bincount(src, weights=val, minlength=n)
    out[:, 4] = np.bincount(dst, minlength=n)
    out[:, 5] = np.bincount(src, minlength=n)

    # Incidence list; self-loops appear once. Edges are already time-sorted,
    # so a stable sort on node keeps each node's timestamps ordered.
    keep = np.column_stack([np.ones(len(src), bool), dst != src]).ravel()
    node = np.column_stack([src, dst]).ravel()[keep]
    t = np.repeat(ts, 2)[keep]
    order = np.argsort(node, kind="stable")
    node, t = node[order], t[order]

    counts = np.bincount(node, minlength=n)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    active = counts >= 2
    first = t[starts[active]]
    last = t[starts[active] + counts[active] - 1]
    out[active, 11] = last - first

    same = node[1:] == node[:-1]
    gap_node = node[1:][same]
    gaps = (t[1:] - t[:-1])[same].astype(np.float64)
    if len(gaps):
        n_gaps = np.bincount(gap_node, minlength=n)
        safe = np.maximum(n_gaps, 1)
        mean = np.bincount(gap_node, weights=gaps, minlength=n) / safe
        dev = gaps - mean[gap_node]
        var = np.bincount(gap_node, weights=dev * dev, minlength=n) / safe

        # sort gaps within each node to read off order statistics
        g_order = np.lexsort((gaps, gap_node))
        sorted_gaps = gaps[g_order]
        g_start = np.concatenate(([0], np.cumsum(n_gaps)[:-1]))
        has = n_gaps > 0
        lo = g_start[has] + (n_gaps[has] - 1) // 2
        hi = g_start[has] + n_gaps[has] // 2

        out[:, 6] = mean
        out[:, 7] = var
        out[has, 8] = sorted_gaps[g_start[has]]
        out[has, 9] = (sorted_gaps[lo] + sorted_gaps[hi]) / 2.0
        out[has, 10] = sorted_gaps[g_start[has] + n_gaps[has] - 1]

    return FeatureMatrix(out, graph.node_ids)


class TemporalFeatureExtractor(TransformerMixin, BaseEstimator):
    """Stateless transformer mapping a :class:`TGraph` to its feature values."""

    def fit(self, graph, y=None):
        self.feature_names_out_ = np.array(FEATURE_NAMES, dtype=object)
        return self

    def transform(self, graph: TGraph) -> np.ndarray:
        return np.array(extract_features(graph).values)

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURE_NAMES, dtype=object)
