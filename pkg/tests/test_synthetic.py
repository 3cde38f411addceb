import numpy as np
import pytest

from lookout.features import FEATURE_NAMES, extract_features
from lookout.synthetic import PLANT_TARGETS, generate_synthetic


def test_deterministic_and_exact_size():
    a = generate_synthetic(200, 3000, ["burst"], seed=5)
    b = generate_synthetic(200, 3000, ["burst"], seed=5)
    assert a.graph.m == 3000 and a.graph.n == 200
    assert a.planted == b.planted
    for name in ("src", "dst", "ts", "val"):
        assert np.array_equal(getattr(a.graph, name), getattr(b.graph, name))


@pytest.mark.parametrize("seed", range(3))
def test_planted_nodes_top_their_feature(seed):
    kinds = list(PLANT_TARGETS)
    synth = generate_synthetic(600, 12_000, kinds, seed=seed)
    F = extract_features(synth.graph).values
    for node, kind in zip(synth.planted, synth.kinds):
        col = F[:, FEATURE_NAMES.index(PLANT_TARGETS[kind])]
        z = (col - col.mean()) / col.std()
        assert np.argmax(z) == node, kind


def test_invalid_requests():
    with pytest.raises(ValueError):
        generate_synthetic(10, 5)
    with pytest.raises(ValueError):
        generate_synthetic(10, 100, ["nope"])
    with pytest.raises(ValueError):
        generate_synthetic(100, 200, ["fanout"] * 5)
