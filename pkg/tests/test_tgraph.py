import io

import numpy as np
import pytest

from lookout.tgraph import (
    AnomalySet,
    Edge,
    GraphFormatError,
    TGraph,
    load_anomalies,
    parse_edges,
    write_edges,
)


def test_parse_sorts_stably_and_defaults_value():
    g = parse_edges("a,b,5\nb,a,2\na,c,2\n")
    assert (g.n, g.m) == (3, 3)
    assert list(g.edges()) == [Edge("b", "a", 2), Edge("a", "c", 2), Edge("a", "b", 5)]
    assert g.val.tolist() == [1.0, 1.0, 1.0]
    assert g.node_ids == ("a", "b", "c")


def test_parse_header_delimiter_and_values():
    g = parse_edges("src\tdst\tts\tval\nx\ty\t3\t2.5\n", delimiter="\t", has_header=True)
    assert list(g.edges()) == [Edge("x", "y", 3, 2.5)]


@pytest.mark.parametrize(
    "text,line",
    [
        ("a,b,1\na,b\n", 2),
        ("a,b,1\na,b,x\n", 2),
        ("a,b,-1\n", 1),
        ("a,b,1,-2\n", 1),
        ("a,b,1,abc\n", 1),
        ("a,b,1,2,3\n", 1),
        ("a,,1\n", 1),
    ],
)
def test_malformed_rows_report_line(text, line):
    with pytest.raises(GraphFormatError) as exc:
        parse_edges(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_empty_after_header():
    with pytest.raises(GraphFormatError, match="no edges"):
        parse_edges("source,destination,timestamp\n", has_header=True)


def test_bipartite_overlap_rejected():
    parse_edges("u1,i1,1\nu2,i1,2\n", mode="bipartite")
    with pytest.raises(GraphFormatError, match="both sides"):
        parse_edges("u1,i1,1\ni1,u2,2\n", mode="bipartite")


def test_large_random_input_scan():
    rng = np.random.default_rng(5)
    tokens = [f"n{i}" for i in rng.integers(0, 3000, size=20_000)]
    ts = rng.integers(0, 10**6, size=10_000)
    rows = [f"{tokens[2 * i]},{tokens[2 * i + 1]},{ts[i]}" for i in range(10_000)]
    g = parse_edges("\n".join(rows))
    assert g.m == 10_000
    assert all(g.ts[i] <= g.ts[i + 1] for i in range(g.m - 1))
    assert g.n == len(set(tokens))
    # stability: equal timestamps keep input order
    order = sorted(range(10_000), key=lambda i: ts[i])
    expected = [(tokens[2 * i], tokens[2 * i + 1]) for i in order]
    got = [(g.node_ids[s], g.node_ids[d]) for s, d in zip(g.src, g.dst)]
    assert got == expected


def test_parse_is_deterministic():
    text = "q,w,3\nw,e,1\ne,q,1\nq,q,2\n"
    a, b = parse_edges(text), parse_edges(text)
    assert a.node_ids == b.node_ids
    for name in ("src", "dst", "ts", "val"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_adjacency_counts_sum_to_2m():
    g = parse_edges("a,b,1\nb,c,2\nc,c,3\na,b,4\nc,a,5\n")
    total = sum(len(g.incoming(v)) + len(g.outgoing(v)) for v in range(g.n))
    assert total == 2 * g.m
    c = g.index("c")
    loop = [i for i in range(g.m) if g.src[i] == g.dst[i] == c]
    assert set(loop) <= set(g.incoming(c)) and set(loop) <= set(g.outgoing(c))


def test_graph_is_read_only(toy_graph):
    with pytest.raises(ValueError):
        toy_graph.ts[0] = 9


def test_write_roundtrip(toy_graph):
    buf = io.StringIO()
    write_edges(toy_graph, buf)
    again = parse_edges(buf.getvalue())
    assert list(again.edges()) == list(toy_graph.edges())


def test_load_anomalies(toy_graph):
    a = load_anomalies("# comment\na\n\nc\n", toy_graph)
    assert a.members == (0, 2) and a.k == 2 and a.origin == "dictated"


def test_load_anomalies_errors(toy_graph):
    with pytest.raises(GraphFormatError, match="unknown node zzz"):
        load_anomalies("zzz\n", toy_graph)
    with pytest.raises(GraphFormatError, match="empty"):
        load_anomalies("# nothing\n", toy_graph)
    with pytest.raises(GraphFormatError, match="duplicate"):
        load_anomalies("a\na\n", toy_graph)


def test_load_anomalies_matches_lookup():
    rng = np.random.default_rng(2)
    rows = [f"v{s},v{d},{t}" for s, d, t in rng.integers(0, 400, size=(3000, 3))]
    g = parse_edges("\n".join(rows))
    picked = rng.choice(g.node_ids, size=50, replace=False).tolist()
    a = load_anomalies("\n".join(picked), g)
    lookup = {tok: i for i, tok in enumerate(g.node_ids)}
    assert list(a.members) == [lookup[t] for t in picked]


def test_anomaly_set_invariants():
    with pytest.raises(ValueError):
        AnomalySet(())
    with pytest.raises(ValueError):
        AnomalySet((1, 1))
    with pytest.raises(ValueError):
        AnomalySet.from_indices([5], n=3)


def test_edge_validation():
    with pytest.raises(ValueError):
        Edge("a", "b", -1)
    with pytest.raises(ValueError):
        Edge("", "b", 1)
    with pytest.raises(ValueError):
        Edge("a", "b", 1, -0.5)


def test_duplicate_tuples_kept():
    g = parse_edges("a,b,1\na,b,1\n")
    assert g.m == 2
