import io
from itertools import combinations

import numpy as np
import pytest

from lookout._rng import derive_seed
from lookout.features import FEATURE_NAMES, extract_features
from lookout.iforest import ForestParams, IsolationForest
from lookout.scoring import ScoreMatrix, enumerate_pairs, scale, score_anomalies
from lookout.synthetic import generate_synthetic


def test_pair_counts():
    assert len(enumerate_pairs(12)) == 66
    assert [tuple(p) for p in enumerate_pairs(2)] == [(0, 0, 1)]
    brute = [(x, y) for x in range(5) for y in range(5) if x < y]
    assert [(p.feature_x, p.feature_y) for p in enumerate_pairs(5)] == brute
    assert [p.index for p in enumerate_pairs(5)] == list(range(10))
    with pytest.raises(ValueError):
        enumerate_pairs(1)


def test_single_pair_composition():
    X = np.random.default_rng(0).exponential(size=(100, 2))
    params = ForestParams(trees=30, sample=64, seed=7)
    S = score_anomalies(X, [3], params, scaling="none")
    forest = IsolationForest(30, 64, derive_seed(7, 0)).fit(X)
    assert S.scores.shape == (1, 1)
    assert S.scores[0, 0] == forest.score(X[3])


def test_deterministic_and_in_range():
    X = np.random.default_rng(1).exponential(size=(200, 4))
    params = ForestParams(trees=20, sample=64, seed=3)
    a = score_anomalies(X, [0, 5, 9], params)
    b = score_anomalies(X, [0, 5, 9], params)
    assert np.array_equal(a.scores, b.scores)
    assert a.scores.shape == (3, 6)
    assert np.all((a.scores > 0) & (a.scores < 1))


def test_threads_do_not_change_result():
    X = np.random.default_rng(1).exponential(size=(200, 4))
    params = ForestParams(trees=10, sample=32, seed=3)
    serial = score_anomalies(X, [1, 2], params, n_jobs=1)
    threaded = score_anomalies(X, [1, 2], params, n_jobs=3)
    assert np.array_equal(serial.scores, threaded.scores)


def test_column_locality():
    rng = np.random.default_rng(2)
    X = rng.exponential(size=(150, 5))
    params = ForestParams(trees=20, sample=64, seed=1)
    base = score_anomalies(X, [0, 1], params).scores
    Y = X.copy()
    Y[:, 2] = rng.exponential(size=150)
    moved = score_anomalies(Y, [0, 1], params).scores
    for p in enumerate_pairs(5):
        touches = 2 in (p.feature_x, p.feature_y)
        if not touches:
            assert np.array_equal(base[:, p.index], moved[:, p.index])
    assert not np.array_equal(base, moved)


def test_planted_anomaly_explained_by_its_deviant_features():
    synth = generate_synthetic(500, 8000, ["fanout"], seed=4)
    F = extract_features(synth.graph)
    node = synth.planted[0]
    # oracle: most deviant columns by z-score
    Z = (F.values - F.values.mean(0)) / np.where(F.values.std(0) > 0, F.values.std(0), 1)
    deviant = set(np.argsort(-Z[node])[:2].tolist())
    assert FEATURE_NAMES.index("outdegree") in deviant
    S = score_anomalies(F, [node], ForestParams(trees=100, sample=256, seed=0))
    best = S.pairs[int(np.argmax(S.scores[0]))]
    assert {best.feature_x, best.feature_y} & {FEATURE_NAMES.index("outdegree"),
                                              FEATURE_NAMES.index("iat_max")}


def test_score_matrix_validation():
    with pytest.raises(ValueError):
        ScoreMatrix.from_array([[1.5]])
    with pytest.raises(ValueError):
        ScoreMatrix(np.zeros((2, 2)), (0,), tuple(enumerate_pairs(3))[:2])
    S = ScoreMatrix.from_array([[0.2, 0.4]])
    assert (S.k, S.l) == (1, 2)


def test_scaling_modes():
    x = np.array([0.0, np.e - 1])
    assert np.allclose(scale(x, "log1p"), [0, 1])
    assert np.array_equal(scale(x, "none"), x)
    with pytest.raises(ValueError):
        scale(x, "sqrt")


def test_custom_detector():
    class Constant:
        def __init__(self, level=0.3):
            self.level = level

        def get_params(self, deep=True):
            return {"level": self.level}

        def set_params(self, **p):
            self.level = p.get("level", self.level)
            return self

        def fit(self, X):
            return self

        def score_samples(self, X):
            return np.full(len(X), self.level)

    S = score_anomalies(np.ones((10, 3)), [0, 4], detector=Constant())
    assert np.all(S.scores == 0.3)


def test_csv_dump():
    X = np.random.default_rng(0).exponential(size=(30, 3))
    S = score_anomalies(X, [1], ForestParams(trees=5, sample=16, seed=0))
    S = ScoreMatrix(S.scores, S.anomalies, S.pairs, ("a", "b", "c"))
    buf = io.StringIO()
    S.to_csv(buf, node_ids=[f"n{i}" for i in range(30)])
    header, row = buf.getvalue().splitlines()
    assert header == "anomaly,a|b,a|c,b|c"
    assert row.startswith("n1,")
