"""scikit-learn style estimators wrapping the clustering pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_mixed_input, encode_like
from .codist import build_model
from .dataset import MissingPolicy, default_bins, exact_mean, normalize
from .initkmix import run_initkmix
from .kmcmd import iterate, random_partition


def _prepare(est, X):
    missing = MissingPolicy(token=est.missing_values)
    raw = check_mixed_input(X, est.categorical_features, missing, k=est.n_clusters)
    if est.n_clusters < 1:
        raise ValueError(f"n_clusters must be >= 1, got {est.n_clusters}")
    if est.n_clusters > raw.n_samples:
        raise ValueError(f"n_samples={raw.n_samples} should be >= n_clusters={est.n_clusters}")
    ds = normalize(raw, est.normalization)
    bins = default_bins(est.n_clusters) if est.n_bins is None else est.n_bins
    model = build_model(ds, bins)
    fill = np.array([exact_mean(raw.numeric[:, j]) for j in range(raw.n_numeric)])
    return ds, model, missing, fill


def _scale(est, numeric: np.ndarray) -> np.ndarray:
    numeric = np.where(np.isnan(numeric), est._fill, numeric)
    params = est.dataset_.provenance.get("normalization", {}).get("columns", {})
    out = np.empty_like(numeric)
    for j, p in enumerate(params.values()):
        if "min" in p:
            span = p["max"] - p["min"]
            out[:, j] = (numeric[:, j] - p["min"]) / span if span > 0 else 0.0
        else:
            out[:, j] = (numeric[:, j] - p["mean"]) / p["std"] if p["std"] > 0 else 0.0
    return out


def _distances(est, X) -> np.ndarray:
    numeric, codes = encode_like(est.dataset_, X, est._missing)
    numeric = _scale(est, numeric)
    centers, model = est.cluster_centers_, est.distance_model_
    k = centers.k
    D = np.zeros((len(codes), k))
    w = model.weights
    for j in range(k):
        diff = numeric - centers.means[j]
        D[:, j] = ((w * diff) ** 2).sum(axis=1) if est.square_weights else (w * diff**2).sum(axis=1)
    for t in range(codes.shape[1]):
        omega = centers.freqs[t] @ model.delta[t]  # (k, X_t)
        col = codes[:, t]
        # an unseen value is as far as possible from every centre
        contrib = np.where(col[:, None] >= 0, omega[:, np.maximum(col, 0)].T, 1.0)
        D += contrib**2
    return D


class KMCMD(ClusterMixin, TransformerMixin, BaseEstimator):
    """K-means clustering for mixed numeric and categorical data.

    Parameters
    ----------
    n_clusters : int, default=2
    init : {"initkmix", "random"} or array-like of shape (n_samples,)
        ``"initkmix"`` builds a deterministic starting partition from
        per-attribute runs; ``"random"`` assigns rows uniformly at random.
    categorical_features : "auto", boolean mask, or list of indices/names
        With ``"auto"``, non-numeric columns are categorical.
    normalization : {"minmax", "zscore"}, default="minmax"
    n_bins : int or None
        Equal-width bins for numeric attributes when computing value
        distances; ``None`` means ``max(n_clusters, 4)``.
    max_iter : int, default=100
    balance : float, default=1.2
        Part-size slack for the consensus partitioner.
    square_weights : bool, default=True
        Use ``(w * diff) ** 2`` for numeric terms; ``False`` uses ``w * diff ** 2``.
    missing_values : str, default="?"
        Token marking missing cells, in addition to None and NaN.
    random_state : int, Generator or None
        Only used by ``init="random"``.

    Attributes
    ----------
    labels_, cluster_centers_, n_iter_, converged_, inertia_,
    distance_model_, dataset_, init_outcome_ (initkmix only)
    """

    def __init__(
        self,
        n_clusters=2,
        init="initkmix",
        categorical_features="auto",
        normalization="minmax",
        n_bins=None,
        max_iter=100,
        balance=1.2,
        square_weights=True,
        missing_values="?",
        random_state=None,
    ):
        self.n_clusters = n_clusters
        self.init = init
        self.categorical_features = categorical_features
        self.normalization = normalization
        self.n_bins = n_bins
        self.max_iter = max_iter
        self.balance = balance
        self.square_weights = square_weights
        self.missing_values = missing_values
        self.random_state = random_state

    def fit(self, X, y=None):
        ds, model, missing, fill = _prepare(self, X)
        k = self.n_clusters
        self.init_outcome_ = None
        if isinstance(self.init, str):
            if self.init == "initkmix":
                outcome = run_initkmix(ds, model, k, self.max_iter, self.balance, self.square_weights)
                self.init_outcome_ = outcome
                start = outcome.labels
            elif self.init == "random":
                start = random_partition(ds.n_samples, k, np.random.default_rng(self.random_state))
            else:
                raise ValueError(f"init must be 'initkmix', 'random' or an array, got {self.init!r}")
        else:
            start = np.asarray(self.init)
        result = iterate(ds, model, start, k, self.max_iter, self.square_weights)
        self.dataset_ = ds
        self.distance_model_ = model
        self._missing, self._fill = missing, fill
        self.result_ = result
        self.labels_ = result.labels
        self.cluster_centers_ = result.centers
        self.n_iter_ = result.n_iter
        self.converged_ = result.converged
        self.inertia_ = result.cost
        self.n_features_in_ = ds.n_attributes
        return self

    def transform(self, X) -> np.ndarray:
        """Distance from every row to every cluster centre, shape (n, k)."""
        check_is_fitted(self, "labels_")
        return _distances(self, X)

    def predict(self, X) -> np.ndarray:
        """Nearest centre per row; ties go to the lowest cluster index."""
        return self.transform(X).argmin(axis=1)

    def fit_predict(self, X, y=None, **kwargs) -> np.ndarray:
        return self.fit(X).labels_


class InitKmix(ClusterMixin, BaseEstimator):
    """Deterministic initial partition for mixed data.

    Runs one KMCMD pass seeded by each attribute and merges the runs into
    ``n_clusters`` groups by consensus (HGPA or MCLA, whichever scores the
    higher average NMI against the runs).

    Attributes
    ----------
    labels_ : consensus partition
    runs_ : per-attribute runs, in column order
    consensus_method_ : "HGPA" or "MCLA"
    anmi_scores_ : dict of both methods' scores
    skipped_ : constant numeric attributes that seeded no run
    """

    def __init__(
        self,
        n_clusters=2,
        categorical_features="auto",
        normalization="minmax",
        n_bins=None,
        max_iter=100,
        balance=1.2,
        square_weights=True,
        missing_values="?",
    ):
        self.n_clusters = n_clusters
        self.categorical_features = categorical_features
        self.normalization = normalization
        self.n_bins = n_bins
        self.max_iter = max_iter
        self.balance = balance
        self.square_weights = square_weights
        self.missing_values = missing_values

    def fit(self, X, y=None):
        ds, model, _, _ = _prepare(self, X)
        outcome = run_initkmix(ds, model, self.n_clusters, self.max_iter, self.balance, self.square_weights)
        self.dataset_ = ds
        self.distance_model_ = model
        self.outcome_ = outcome
        self.labels_ = outcome.labels
        self.runs_ = outcome.runs
        self.consensus_method_ = outcome.method
        self.anmi_scores_ = outcome.anmi_scores
        self.skipped_ = outcome.skipped
        self.n_features_in_ = ds.n_attributes
        return self

