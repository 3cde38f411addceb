import statistics

import numpy as np
import pytest

from lookout.tgraph import TGraph

ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    """Register an acceptance criterion outcome for the terminal summary."""

    def _record(name: str, passed: bool, detail: str = "") -> bool:
        ACCEPTANCE.append((name, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}" + (f" -- {detail}" if detail else ""))


def random_edges(rng, n_nodes, n_edges, horizon=50, loops=True):
    """Raw edge rows with repeated pairs, equal timestamps and self-loops."""
    src = rng.integers(0, n_nodes, size=n_edges)
    dst = rng.integers(0, n_nodes, size=n_edges)
    if not loops:
        dst = np.where(dst == src, (dst + 1) % n_nodes, dst)
    ts = rng.integers(0, horizon, size=n_edges)
    val = np.round(rng.exponential(2.0, size=n_edges), 3)
    return src, dst, ts, val


def brute_force_features(n, src, dst, ts, val):
    """Per-node recomputation from raw rows, one node at a time."""
    rows = list(zip(src.tolist(), dst.tolist(), ts.tolist(), val.tolist()))
    out = np.zeros((n, 12))
    for v in range(n):
        incoming = [r for r in rows if r[1] == v]
        outgoing = [r for r in rows if r[0] == v]
        incident = [r[2] for r in rows if r[0] == v or r[1] == v]
        out[v, 0] = len({r[0] for r in incoming})
        out[v, 1] = len({r[1] for r in outgoing})
        out[v, 2] = sum(r[3] for r in incoming)
        out[v, 3] = sum(r[3] for r in outgoing)
        out[v, 4] = len(incoming)
        out[v, 5] = len(outgoing)
        times = sorted(incident)
        if len(times) >= 2:
            gaps = [b - a for a, b in zip(times, times[1:])]
            out[v, 6] = statistics.mean(gaps)
            out[v, 7] = statistics.pvariance(gaps)
            out[v, 8] = min(gaps)
            out[v, 9] = statistics.median(gaps)
            out[v, 10] = max(gaps)
            out[v, 11] = times[-1] - times[0]
    return out


@pytest.fixture
def toy_graph():
    return TGraph.from_arrays([0, 1, 0], [1, 0, 2], [5, 2, 2], node_ids=("a", "b", "c"))
