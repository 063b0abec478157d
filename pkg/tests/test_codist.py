import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from initkmix import datasets
from initkmix.codist import (
    ModelError,
    build_model,
    cooccurrence_delta,
    delta,
    delta_wrt,
    mean_pair_distance,
    numeric_weight,
    value_distances,
)
from initkmix.dataset import normalize

from _helpers import make_dataset, mixed_blobs, subset_delta

A = [0, 0, 0, 1]
B = [0, 0, 1, 1]


def test_worked_example():
    # p(.|a) = (2/3, 1/3), p(.|b) = (0, 1): max(2/3,0) + max(1/3,1) - 1
    assert delta_wrt(A, B, 0, 1) == pytest.approx(2 / 3, abs=1e-15)
    assert subset_delta(A, B, 0, 1) == pytest.approx(2 / 3, abs=1e-15)
    assert delta(A, [B], 0, 1) == pytest.approx(2 / 3, abs=1e-15)


def test_identical_and_disjoint_conditionals():
    assert delta_wrt([0, 0, 1, 1], [0, 1, 0, 1], 0, 1) == 0.0
    assert delta_wrt([0, 0, 1, 1], [0, 0, 1, 1], 0, 1) == 1.0


def test_model_of_worked_example(toy):
    m = build_model(toy, 2)
    np.testing.assert_allclose(m.delta[0], [[0, 2 / 3], [2 / 3, 0]], atol=1e-15)
    assert m.weights.shape == (0,)
    assert len(m.delta) == 2


def test_single_attribute_is_a_model_error():
    ds = make_dataset({"A": list("abab")}, {"A": "categorical"})
    with pytest.raises(ModelError):
        build_model(ds, 4)


def test_one_numeric_one_categorical():
    ds = normalize(make_dataset({"x": [0.0, 0.1, 0.9, 1.0], "c": list("aabb")}, {"x": "numeric", "c": "categorical"}))
    m = build_model(ds, 2)
    assert len(m.delta) == 1 and m.weights.shape == (1,)
    # bins perfectly predict c and vice versa
    assert m.weights[0] == 1.0
    assert m.delta[0][0, 1] == 1.0


def test_numeric_weight_examples():
    assert numeric_weight([0, 0, 0], [[0, 1, 0]]) == 0.0
    assert numeric_weight([0, 0, 1, 1], [[0, 0, 1, 1]]) == 1.0
    D = np.array([[0, 0.2, 0.4], [0.2, 0, 0.6], [0.4, 0.6, 0]])
    assert mean_pair_distance(D) == pytest.approx(0.4, abs=1e-15)


def test_zero_support_values_get_zero_distance():
    D = cooccurrence_delta([0, 0, 2, 2], [0, 1, 1, 1], n_target=3)
    assert np.all(D[1] == 0) and np.all(D[:, 1] == 0)
    assert D[0, 2] > 0


def test_value_distances_need_a_context():
    with pytest.raises(ModelError):
        value_distances([0, 1], [])


def _random_table(rng, n, m):
    alph = rng.integers(1, 13, size=m)
    return [rng.integers(0, a, size=n) for a in alph]


def test_closed_form_matches_subset_search():
    rng = np.random.default_rng(20240607)
    for _ in range(200):
        n = int(rng.integers(2, 51))
        cols = _random_table(rng, n, int(rng.integers(2, 4)))
        for i, t in enumerate(cols):
            for j, c in enumerate(cols):
                if i == j:
                    continue
                D = cooccurrence_delta(t, c, int(t.max()) + 1)
                for a in np.unique(t):
                    for b in np.unique(t):
                        if a < b:
                            assert abs(D[a, b] - subset_delta(t, c, a, b)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_model_invariants(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 40))
    cols = {f"c{j}": [f"v{v}" for v in rng.integers(0, 5, n)] for j in range(3)}
    cols["x"] = rng.normal(size=n).tolist()
    kinds = {"c0": "cat", "c1": "cat", "c2": "cat", "x": "numeric"}
    ds = normalize(make_dataset(cols, kinds))
    m = build_model(ds, 4)
    for D in m.delta + m.bin_delta:
        assert np.all(D >= 0) and np.all(D <= 1)
        np.testing.assert_array_equal(D, D.T)
        assert np.all(np.diag(D) == 0)
    assert np.all((m.weights >= 0) & (m.weights <= 1))
    perm = rng.permutation(n)
    mp = build_model(ds.take(perm), 4)
    for D1, D2 in zip(m.delta + m.bin_delta, mp.delta + mp.bin_delta):
        np.testing.assert_allclose(D1, D2, rtol=0, atol=1e-15)


def test_model_dump_names_everything():
    ds = normalize(mixed_blobs(50))
    d = build_model(ds, 4).to_dict(ds)
    assert [e["attribute"] for e in d["categorical"]] == ["c1", "c2"]
    assert [e["attribute"] for e in d["numeric"]] == ["x1", "x2"]


def test_bundled_model_shapes():
    ds = normalize(datasets.load("german_credit"))
    m = build_model(ds, 4)
    assert len(m.delta) == 13 and len(m.weights) == 7
    assert all(D.shape == (len(v), len(v)) for D, v in zip(m.delta, ds.value_names))
