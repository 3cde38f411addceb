"""Synthetic t-graphs with power-law activity and planted anomalous nodes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tgraph import TGraph

#: planted behavior -> feature it makes extreme
PLANT_TARGETS = {
    "fanout": "outdegree",   # many distinct destinations, two bursts far apart
    "fanin": "indegree",     # many distinct sources
    "burst": "outweight_r",  # repeated edges to one destination, same timestamp
    "heavy": "outweight_v",  # a few edges carrying very large values
}


@dataclass(frozen=True)
class SyntheticGraph:
    graph: TGraph
    planted: tuple[int, ...]
    kinds: tuple[str, ...]


def _powerlaw_weights(n: int, alpha: float, rng) -> np.ndarray:
    w = (np.arange(1, n + 1, dtype=np.float64)) ** -alpha
    return rng.permutation(w / w.sum())


def planted_size(n: int, m: int, alpha: float = 0.6) -> int:
    """Edges per planted node: a few times the expected busiest base node."""
    top_share = 1.0 / np.sum(np.arange(1, n + 1, dtype=np.float64) ** -alpha)
    return int(min(n - 1, max(30, math.ceil(3 * m * top_share) + 10)))


def generate_synthetic(n, m, planted=(), seed=0, alpha=0.6, horizon=None, size=None):
    """Generate ``m`` edges over ``n`` nodes.

    ``planted`` is a sequence of kinds from :data:`PLANT_TARGETS`; each gets
    a distinct random node and ``size`` edges (default :func:`planted_size`,
    doubled for bursts) out of the ``m`` budget.  The first ``n`` edges
    touch every node once so all ``n`` nodes exist.  Sources and destinations follow independent
    power-law popularity, timestamps are uniform on ``[0, horizon)``.
    Fully determined by ``seed``.
    """
    if not m >= n >= 2:
        raise ValueError("need m >= n >= 2")
    for kind in planted:
        if kind not in PLANT_TARGETS:
            raise ValueError(f"unknown planted behavior {kind!r}")
    rng = np.random.default_rng(seed)
    horizon = horizon or max(1000, m)
    size = size or planted_size(n, m, alpha)
    counts = [2 * size if kind == "burst" else size for kind in planted]
    budget = m - n - sum(counts)
    if budget < 0:
        raise ValueError(f"{len(planted)} planted nodes of {size} edges do not fit in m={m}")
    if len(planted) > n:
        raise ValueError("more planted nodes than nodes")

    nodes = rng.choice(n, size=len(planted), replace=False) if planted else np.array([], int)

    # coverage edges: node i -> random other node
    cover_src = np.arange(n)
    cover_dst = (cover_src + rng.integers(1, n, size=n)) % n
    out_w = _powerlaw_weights(n, alpha, rng)
    in_w = _powerlaw_weights(n, alpha, rng)
    base_src = rng.choice(n, size=budget, p=out_w)
    base_dst = rng.choice(n, size=budget, p=in_w)
    clash = base_src == base_dst
    base_dst[clash] = (base_dst[clash] + 1) % n

    src = [cover_src, base_src]
    dst = [cover_dst, base_dst]
    ts = [rng.integers(0, horizon, size=n + budget)]
    val = [rng.lognormal(0.0, 1.0, size=n + budget)]

    for node, kind, size in zip(nodes.tolist(), planted, counts):
        others = np.delete(np.arange(n), node)
        if kind in ("fanout", "fanin"):
            peers = rng.choice(others, size=size, replace=kind == "fanin" and size > n - 1)
            half = size // 2
            t = np.concatenate([
                rng.integers(0, max(1, horizon // 20), size=half),
                rng.integers(horizon - max(1, horizon // 20), horizon, size=size - half),
            ])
            a, b = (np.full(size, node), peers) if kind == "fanout" else (peers, np.full(size, node))
            v = rng.lognormal(0.0, 1.0, size=size)
        elif kind == "burst":
            a, b = np.full(size, node), np.full(size, rng.choice(others))
            t = np.full(size, rng.integers(0, horizon))
            v = np.ones(size)
        else:  # heavy
            a, b = np.full(size, node), rng.choice(others, size=size)
            t = rng.integers(0, horizon, size=size)
            v = rng.lognormal(0.0, 1.0, size=size) * 20.0
        src.append(a)
        dst.append(b)
        ts.append(t)
        val.append(v)

    graph = TGraph.from_arrays(
        np.concatenate(src), np.concatenate(dst), np.concatenate(ts), np.concatenate(val)
    )
    return SyntheticGraph(graph, tuple(int(x) for x in nodes), tuple(planted))
