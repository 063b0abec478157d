"""K-means-style clustering for mixed data with frequency-based centres.

A centre stores the mean of each numeric attribute and, for each categorical
attribute, the relative frequency of every value among the cluster members.
The distance from a row to a centre is::

    sum_t (w_t * (x_t - mean_t)) ** 2  +  sum_t omega_t(x_t, centre) ** 2

where ``omega_t`` is the frequency-weighted mean value distance between the
row's value and the centre's value distribution. Updates are batch (all
centres, then all assignments), ties go to the lowest cluster index, and
empty clusters are refilled with the rows farthest from their own centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .codist import DistanceModel
from .dataset import Dataset


class EmptyClusterError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Centers:
    """Stacked centres of ``k`` clusters.

    ``means`` is ``(k, m_r)``; ``freqs[t]`` is ``(k, X_t)`` with rows summing
    to one.
    """

    means: np.ndarray
    freqs: tuple[np.ndarray, ...]

    @property
    def k(self) -> int:
        return self.means.shape[0]


@dataclass(eq=False)
class KmcmdResult:
    labels: np.ndarray
    centers: Centers
    n_iter: int
    converged: bool
    cost: float
    # (cost of previous labels, cost after reassignment) under each sweep's centres
    cost_history: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centers.k


def check_labels(labels, n: int, k: int | None = None) -> tuple[np.ndarray, int]:
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        if np.issubdtype(labels.dtype, np.floating) and np.all(labels == np.round(labels)):
            labels = labels.astype(np.int64)
        else:
            raise ValueError("labels must be integers")
    labels = labels.astype(np.int64)
    if n and labels.min() < 0:
        raise ValueError("labels must be non-negative")
    if k is None:
        k = int(labels.max()) + 1 if n else 0
    elif n and labels.max() >= k:
        raise ValueError(f"label {labels.max()} out of range for k={k}")
    if k > n:
        raise ValueError(f"cannot form {k} clusters from {n} rows")
    return labels, k


def _group_sum(values: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    # Sums of sorted values: the result depends only on each group's multiset,
    # so permuting the rows cannot change the last bits of a mean.
    out = np.zeros((k, values.shape[1]))
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(k + 1))
    for j in range(k):
        block = values[order[bounds[j] : bounds[j + 1]]]
        if len(block):
            out[j] = np.sort(block, axis=0).sum(axis=0)
    return out


def compute_centers(ds: Dataset, labels, k: int) -> Centers:
    """Per-cluster numeric means and categorical value frequencies.

    Raises
    ------
    EmptyClusterError
        If some cluster in ``range(k)`` has no rows.
    """
    labels = np.asarray(labels, dtype=np.int64)
    sizes = np.bincount(labels, minlength=k)
    if np.any(sizes == 0):
        raise EmptyClusterError(f"empty clusters: {np.flatnonzero(sizes == 0).tolist()}")
    means = _group_sum(ds.numeric, labels, k) / sizes[:, None]
    freqs = []
    for t, X in enumerate(ds.n_values):
        counts = np.bincount(labels * X + ds.categorical[:, t], minlength=k * X).reshape(k, X)
        freqs.append(counts / sizes[:, None])
    return Centers(means, tuple(freqs))


def omega_table(model: DistanceModel, centers: Centers, t: int) -> np.ndarray:
    """``(k, X_t)`` table of omega between every centre and every value of attribute ``t``."""
    return centers.freqs[t] @ model.delta[t]


def center_distances(ds: Dataset, model: DistanceModel, centers: Centers, square_weights: bool = True) -> np.ndarray:
    """``(n, k)`` matrix of row-to-centre distances."""
    n, k = ds.n_samples, centers.k
    D = np.zeros((n, k))
    if ds.n_numeric:
        w = model.weights
        for j in range(k):
            diff = ds.numeric - centers.means[j]
            if square_weights:
                D[:, j] = ((w * diff) ** 2).sum(axis=1)
            else:
                D[:, j] = (w * diff**2).sum(axis=1)
    for t in range(ds.n_categorical):
        omega = omega_table(model, centers, t)
        D += (omega[:, ds.categorical[:, t]] ** 2).T
    return D


def point_center_distance(
    ds: Dataset, model: DistanceModel, row: int, centers: Centers, j: int, square_weights: bool = True
) -> float:
    """Distance between one row and one centre, evaluated term by term."""
    total = 0.0
    for t in range(ds.n_numeric):
        diff = ds.numeric[row, t] - centers.means[j, t]
        w = model.weights[t]
        total += (w * diff) ** 2 if square_weights else w * diff**2
    for t in range(ds.n_categorical):
        x = ds.categorical[row, t]
        omega = float(np.dot(centers.freqs[t][j], model.delta[t][:, x]))
        total += omega**2
    return total


def reseed_empty(labels: np.ndarray, own_distance: np.ndarray, k: int) -> np.ndarray:
    """Fill each empty cluster with the row farthest from its own centre.

    Clusters are filled in ascending order; a donor cluster must keep at least
    one row. Distance ties go to the lowest row index.
    """
    labels = labels.copy()
    sizes = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(sizes == 0)
    if len(empty) == 0:
        return labels
    score = np.asarray(own_distance, dtype=float).copy()
    for j in empty:
        eligible = sizes[labels] > 1
        cand = np.where(eligible, score, -np.inf)
        i = int(np.argmax(cand))
        if not np.isfinite(cand[i]):
            raise EmptyClusterError("not enough rows to fill every cluster")
        sizes[labels[i]] -= 1
        labels[i] = j
        sizes[j] += 1
        score[i] = -np.inf
    return labels


def _repair_initial(ds, model, labels, k, square_weights):
    sizes = np.bincount(labels, minlength=k)
    if np.all(sizes > 0):
        return labels
    present = np.flatnonzero(sizes > 0)
    remap = np.full(k, -1)
    remap[present] = np.arange(len(present))
    centers = compute_centers(ds, remap[labels], len(present))
    D = center_distances(ds, model, centers, square_weights)
    own = D[np.arange(len(labels)), remap[labels]]
    return reseed_empty(labels, own, k)


def iterate(
    ds: Dataset,
    model: DistanceModel,
    init,
    k: int | None = None,
    max_iter: int = 100,
    square_weights: bool = True,
) -> KmcmdResult:
    """Run batch centre/assignment sweeps from an initial partition.

    Stops when a sweep moves no row or after ``max_iter`` sweeps. ``k``
    defaults to ``max(init) + 1``; empty clusters in ``init`` are filled
    before the first sweep.

    Returns
    -------
    KmcmdResult
        Final labels and centres; ``n_iter`` counts sweeps, and ``converged``
        is true only if the last sweep changed nothing.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    n = ds.n_samples
    labels, k = check_labels(init, n, k)
    if k < 1:
        raise ValueError("k must be >= 1")
    labels = _repair_initial(ds, model, labels, k, square_weights)
    rows = np.arange(n)
    history = []
    converged = False
    n_iter = 0
    centers = None
    for n_iter in range(1, max_iter + 1):
        centers = compute_centers(ds, labels, k)
        D = center_distances(ds, model, centers, square_weights)
        new = D.argmin(axis=1)
        own = D[rows, new]
        history.append((math.fsum(D[rows, labels]), math.fsum(own)))
        new = reseed_empty(new, own, k)
        changed = int(np.count_nonzero(new != labels))
        labels = new
        if changed == 0:
            converged = True
            break
    if not converged:
        centers = compute_centers(ds, labels, k)
        D = center_distances(ds, model, centers, square_weights)
    cost = math.fsum(D[rows, labels])
    return KmcmdResult(labels, centers, n_iter, converged, cost, history)


def random_partition(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Assign each of ``n`` rows to one of ``k`` clusters uniformly at random."""
    return rng.integers(0, k, size=n)
