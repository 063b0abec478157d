import numpy as np
import pandas as pd
import pytest
from sklearn.base import clone

from initkmix import KMCMD, InitKmix
from initkmix._validation import check_mixed_input, resolve_kinds
from initkmix.metrics import accuracy


def _frame(n=120, seed=0):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    return pd.DataFrame({
        "x": y * 4.0 + rng.normal(0, 1, n),
        "z": rng.normal(0, 1, n),
        "c": np.where(rng.random(n) < 0.85, np.where(y == 1, "hi", "lo"), "mid"),
        "d": rng.choice(["p", "q", "r"], n),
    }), y


def test_params_and_clone():
    est = KMCMD(n_clusters=3, n_bins=6)
    assert est.get_params()["n_bins"] == 6
    c = clone(est)
    assert c.get_params() == est.get_params()


def test_fit_predict_transform():
    X, y = _frame()
    est = KMCMD(2).fit(X)
    assert accuracy(est.labels_, y)[0] > 0.85
    assert est.converged_ and est.n_iter_ >= 1 and est.inertia_ > 0
    np.testing.assert_array_equal(est.predict(X), est.labels_)
    D = est.transform(X)
    assert D.shape == (len(X), 2)
    assert est.inertia_ == pytest.approx(D[np.arange(len(X)), est.labels_].sum(), rel=1e-12)
    assert est.init_outcome_.method in ("HGPA", "MCLA")


def test_initkmix_is_deterministic_and_ignores_random_state():
    X, _ = _frame(seed=3)
    a = KMCMD(2, random_state=1).fit_predict(X)
    b = KMCMD(2, random_state=99).fit_predict(X)
    np.testing.assert_array_equal(a, b)


def test_random_init_reproducible():
    X, _ = _frame(seed=4)
    a = KMCMD(2, init="random", random_state=5).fit(X)
    b = KMCMD(2, init="random", random_state=5).fit(X)
    np.testing.assert_array_equal(a.labels_, b.labels_)
    assert a.init_outcome_ is None


def test_explicit_init_array():
    X, y = _frame(seed=6)
    est = KMCMD(2, init=y).fit(X)
    assert len(np.unique(est.labels_)) == 2


def test_unseen_category_is_far_from_every_centre():
    X, _ = _frame()
    est = KMCMD(2).fit(X)
    row = X.iloc[:1].copy()
    base = est.transform(row)
    row["c"] = "never-seen"
    far = est.transform(row)
    assert np.all(far >= base - 1e-12)
    assert np.all(far - base <= 1.0 + 1e-12)


def test_missing_values_are_handled():
    X, _ = _frame()
    X = X.astype({"x": float})
    X.loc[3, "x"] = np.nan
    X.loc[5, "c"] = None
    est = KMCMD(2).fit(X)
    assert est.dataset_.provenance["missing"]["numeric_imputed"] == {"x": 1}
    assert np.isfinite(est.transform(X)).all()


def test_numpy_object_input_and_feature_selection():
    X = np.array([[1.0, "a"], [1.2, "a"], [5.0, "b"], [5.3, "b"], [0.9, "a"]], dtype=object)
    est = InitKmix(2).fit(X)
    assert est.dataset_.n_numeric == 1 and est.dataset_.n_categorical == 1
    assert len(np.unique(est.labels_)) == 2 and est.consensus_method_ in ("HGPA", "MCLA")
    ds = check_mixed_input(np.array([[1, 2], [3, 4], [5, 4]]), categorical_features=[1])
    assert ds.n_categorical == 1
    ds = check_mixed_input(np.array([[1, 2], [3, 4], [5, 4]]), categorical_features=[True, True])
    assert ds.n_categorical == 2


def test_kind_resolution_errors():
    names, cells = ["a", "b"], [[1, 2], ["x", "y"]]
    assert resolve_kinds(names, cells, None) == ["numeric", "categorical"]
    with pytest.raises(ValueError):
        resolve_kinds(names, cells, None, ["nope"])
    with pytest.raises(ValueError):
        resolve_kinds(names, cells, None, [5])
    with pytest.raises(ValueError):
        resolve_kinds(names, cells, None, [True])
    with pytest.raises(ValueError):
        resolve_kinds(names, cells, None, "manual")


def test_input_errors():
    X, _ = _frame(10)
    with pytest.raises(ValueError):
        KMCMD(20).fit(X)
    with pytest.raises(ValueError):
        KMCMD(2, init="kmeans++").fit(X)
    with pytest.raises(ValueError):
        check_mixed_input(np.arange(5))
    est = KMCMD(2).fit(X)
    with pytest.raises(ValueError):
        est.predict(X[["x", "c"]])
