"""Time-evolving multigraphs (t-graphs) and anomaly lists."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence, TextIO

import numpy as np

Mode = Literal["unipartite", "bipartite"]


class GraphFormatError(ValueError):
    """Raised for malformed edge or anomaly input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Edge:
    source: str
    destination: str
    timestamp: int
    value: float = 1.0

    def __post_init__(self):
        if not self.source or not self.destination:
            raise ValueError("edge endpoints must be non-empty tokens")
        if self.timestamp < 0:
            raise ValueError("timestamp must be non-negative")
        if not self.value >= 0:
            raise ValueError("value must be non-negative")


@dataclass(frozen=True, eq=False)
class TGraph:
    """Immutable, timestamp-ordered edge list with a dense node index.

    Edge arrays are parallel numpy arrays: ``src``/``dst`` hold dense node
    indices, ``ts`` int64 timestamps (non-decreasing) and ``val`` float64
    values.  ``node_ids[i]`` is the token of node ``i``.
    """

    src: np.ndarray
    dst: np.ndarray
    ts: np.ndarray
    val: np.ndarray
    node_ids: tuple[str, ...]
    mode: Mode = "unipartite"
    _index: dict[str, int] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name in ("src", "dst", "ts", "val"):
            arr = getattr(self, name)
            arr.setflags(write=False)
        if self._index is None:
            object.__setattr__(
                self, "_index", {tok: i for i, tok in enumerate(self.node_ids)}
            )

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return len(self.ts)

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise KeyError(f"unknown node {token}") from None

    def edges(self) -> Iterable[Edge]:
        ids = self.node_ids
        for s, d, t, v in zip(self.src, self.dst, self.ts, self.val):
            yield Edge(ids[s], ids[d], int(t), float(v))

    def incoming(self, node: int) -> np.ndarray:
        """Indices of edges whose destination is ``node``."""
        return self._adjacency()[1][node]

    def outgoing(self, node: int) -> np.ndarray:
        """Indices of edges whose source is ``node``."""
        return self._adjacency()[0][node]

    def _adjacency(self):
        cached = self.__dict__.get("_adj")
        if cached is None:
            cached = (_group(self.src, self.n), _group(self.dst, self.n))
            object.__setattr__(self, "_adj", cached)
        return cached

    @classmethod
    def from_arrays(cls, src, dst, ts, val=None, node_ids=None, mode: Mode = "unipartite"):
        """Build from integer endpoint arrays (already densely indexed).

        Edges are stably sorted by timestamp; ``node_ids`` defaults to the
        decimal string of each index.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        ts = np.asarray(ts, dtype=np.int64)
        val = np.ones(len(ts)) if val is None else np.asarray(val, dtype=np.float64)
        if not (len(src) == len(dst) == len(ts) == len(val)):
            raise ValueError("edge arrays must have equal length")
        if len(ts) == 0:
            raise GraphFormatError("no edges")
        if ts.min() < 0:
            raise GraphFormatError("negative timestamp")
        if not np.all(val >= 0):
            raise GraphFormatError("negative or NaN value")
        n = int(max(src.max(), dst.max())) + 1 if node_ids is None else len(node_ids)
        if min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n:
            raise ValueError("edge endpoint out of range")
        if node_ids is None:
            node_ids = tuple(str(i) for i in range(n))
        order = np.argsort(ts, kind="stable")
        graph = cls(src[order], dst[order], ts[order], val[order], tuple(node_ids), mode)
        if mode == "bipartite":
            _check_bipartite(graph)
        elif mode != "unipartite":
            raise ValueError(f"unknown mode {mode!r}")
        return graph


def _group(keys: np.ndarray, n: int) -> list[np.ndarray]:
    order = np.argsort(keys, kind="stable")
    bounds = np.cumsum(np.bincount(keys, minlength=n))[:-1]
    return np.split(order, bounds)


def _check_bipartite(graph: TGraph) -> None:
    shared = np.intersect1d(graph.src, graph.dst)
    if len(shared):
        raise GraphFormatError(
            f"bipartite graph has node {graph.node_ids[shared[0]]} on both sides"
        )


def parse_edges(
    stream: TextIO | str,
    delimiter: str = ",",
    has_header: bool = False,
    mode: Mode = "unipartite",
) -> TGraph:
    """Parse ``source,destination,timestamp[,value]`` rows into a TGraph.

    Node indices are assigned in order of first appearance (source before
    destination within a row).  Blank lines are skipped.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    index: dict[str, int] = {}
    src, dst, ts, val = [], [], [], []
    reader = csv.reader(stream, delimiter=delimiter)
    for row in reader:
        lineno = reader.line_num
        if has_header and lineno == 1:
            continue
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) not in (3, 4):
            raise GraphFormatError(f"expected 3 or 4 columns, got {len(row)}", lineno)
        s, d = row[0].strip(), row[1].strip()
        if not s or not d:
            raise GraphFormatError("empty node token", lineno)
        try:
            t = int(row[2])
        except ValueError:
            raise GraphFormatError(f"non-integer timestamp {row[2]!r}", lineno) from None
        if t < 0:
            raise GraphFormatError(f"negative timestamp {t}", lineno)
        v = 1.0
        if len(row) == 4:
            try:
                v = float(row[3])
            except ValueError:
                raise GraphFormatError(f"non-numeric value {row[3]!r}", lineno) from None
            if not (v >= 0 and np.isfinite(v)):
                raise GraphFormatError(f"invalid value {row[3]!r}", lineno)
        src.append(index.setdefault(s, len(index)))
        dst.append(index.setdefault(d, len(index)))
        ts.append(t)
        val.append(v)
    if not ts:
        raise GraphFormatError("no edges")
    return TGraph.from_arrays(src, dst, ts, val, node_ids=tuple(index), mode=mode)


def read_edges(path, **options) -> TGraph:
    with open(path, newline="") as fh:
        return parse_edges(fh, **options)


def write_edges(graph: TGraph, stream: TextIO, delimiter: str = ",") -> None:
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    ids = graph.node_ids
    for s, d, t, v in zip(graph.src.tolist(), graph.dst.tolist(), graph.ts.tolist(),
                          graph.val.tolist()):
        writer.writerow((ids[s], ids[d], t, repr(v)))


@dataclass(frozen=True)
class AnomalySet:
    members: tuple[int, ...]
    origin: Literal["detected", "dictated"] = "dictated"

    def __post_init__(self):
        if not self.members:
            raise ValueError("anomaly set is empty")
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate anomaly")

    @property
    def k(self) -> int:
        return len(self.members)

    @classmethod
    def from_indices(cls, indices: Sequence[int], n: int, origin="dictated") -> "AnomalySet":
        members = tuple(int(i) for i in indices)
        bad = [i for i in members if not 0 <= i < n]
        if bad:
            raise ValueError(f"anomaly index {bad[0]} out of range for {n} nodes")
        return cls(members, origin)


def load_anomalies(stream: TextIO | str, graph: TGraph) -> AnomalySet:
    """Read one node token per line; ``#`` comments and blank lines are skipped."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    members = []
    seen = set()
    for lineno, line in enumerate(stream, 1):
        token = line.strip()
        if not token or token.startswith("#"):
            continue
        if token not in graph._index:
            raise GraphFormatError(f"unknown node {token}", lineno)
        if token in seen:
            raise GraphFormatError(f"duplicate anomaly {token}", lineno)
        seen.add(token)
        members.append(graph._index[token])
    if not members:
        raise GraphFormatError("empty anomaly list")
    return AnomalySet(tuple(members), "dictated")


def read_anomalies(path, graph: TGraph) -> AnomalySet:
    with open(path) as fh:
        return load_anomalies(fh, graph)
