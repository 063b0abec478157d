"""Data-driven distances between categorical values and numeric attribute weights.

The distance between two values ``a`` and ``b`` of one attribute, seen through
another attribute, is the largest achievable ``p(w | a) + p(not w | b) - 1``
over subsets ``w`` of the other attribute's values. The maximizing subset
holds exactly the values ``v`` with ``p(v | a) >= p(v | b)``, which gives the
closed form ``sum_v max(p(v | a), p(v | b)) - 1`` used here. Distances are
averaged over all other attributes; numeric attributes take part through an
equal-width discretization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import CATEGORICAL, Dataset, Discretization, default_bins, discretize


class ModelError(ValueError):
    """The distance model cannot be defined for the given data."""


@dataclass(frozen=True, eq=False)
class DistanceModel:
    """Per-attribute value distances and numeric attribute weights.

    Attributes
    ----------
    delta : one symmetric ``(X_t, X_t)`` matrix per categorical attribute
    weights : ``(m_r,)`` weight of each numeric attribute, in [0, 1]
    bin_delta : the value-distance matrices of the discretized numeric
        attributes (the weights are their mean off-diagonal entries)
    discretization : binning used for the numeric attributes
    zero_support : ``(attribute name, value code)`` pairs with no rows
    """

    delta: tuple[np.ndarray, ...]
    weights: np.ndarray
    bin_delta: tuple[np.ndarray, ...]
    discretization: Discretization
    zero_support: list = field(default_factory=list)

    def to_dict(self, ds: Dataset | None = None) -> dict:
        num_names = cat_names = None
        if ds is not None:
            cat_names = [a[0] for a in ds.attributes if a[1] == CATEGORICAL]
            num_names = [a[0] for a in ds.attributes if a[1] != CATEGORICAL]
        out = {"categorical": [], "numeric": []}
        for t, d in enumerate(self.delta):
            entry = {"delta": d.tolist()}
            if ds is not None:
                entry["attribute"] = cat_names[t]
                entry["values"] = list(ds.value_names[t])
            out["categorical"].append(entry)
        for t, w in enumerate(self.weights):
            entry = {
                "weight": float(w),
                "bins": self.discretization.bins,
                "occupied_bins": self.discretization.occupied[t].tolist(),
                "delta": self.bin_delta[t].tolist(),
            }
            if ds is not None:
                entry["attribute"] = num_names[t]
            out["numeric"].append(entry)
        out["zero_support"] = [list(z) for z in self.zero_support]
        return out


def conditional_table(target, context, n_target: int | None = None, n_context: int | None = None):
    """Row-normalized co-occurrence table ``P[a, v] = p(context = v | target = a)``.

    Returns ``(P, support)`` where ``support[a]`` is the number of rows with
    ``target == a``. Rows of unsupported values are all zero.
    """
    target = np.asarray(target, dtype=np.int64)
    context = np.asarray(context, dtype=np.int64)
    n_target = int(target.max()) + 1 if n_target is None else n_target
    n_context = int(context.max()) + 1 if n_context is None else n_context
    counts = np.bincount(target * n_context + context, minlength=n_target * n_context)
    counts = counts.reshape(n_target, n_context).astype(float)
    support = counts.sum(axis=1)
    P = np.divide(counts, support[:, None], out=np.zeros_like(counts), where=support[:, None] > 0)
    return P, support


def cooccurrence_delta(target, context, n_target: int | None = None, n_context: int | None = None):
    """All pairwise distances between values of ``target`` seen through ``context``.

    Returns an ``(X, X)`` symmetric matrix with zero diagonal and entries in
    [0, 1]. Values of ``target`` that never occur get distance 0 to
    everything.
    """
    P, support = conditional_table(target, context, n_target, n_context)
    D = np.maximum(P[:, None, :], P[None, :, :]).sum(axis=2) - 1.0
    np.clip(D, 0.0, 1.0, out=D)
    absent = support == 0
    D[absent, :] = 0.0
    D[:, absent] = 0.0
    np.fill_diagonal(D, 0.0)
    return D


def delta_wrt(target, context, alpha: int, beta: int) -> float:
    """Distance between values ``alpha`` and ``beta`` of ``target`` w.r.t. ``context``."""
    target = np.asarray(target)
    n_target = max(int(target.max()), alpha, beta) + 1
    return float(cooccurrence_delta(target, context, n_target)[alpha, beta])


def value_distances(target, contexts, n_target: int | None = None) -> np.ndarray:
    """Mean of :func:`cooccurrence_delta` over every column in ``contexts``."""
    contexts = list(contexts)
    if not contexts:
        raise ModelError("value distances need at least one other attribute")
    target = np.asarray(target, dtype=np.int64)
    n_target = int(target.max()) + 1 if n_target is None else n_target
    total = np.zeros((n_target, n_target))
    for ctx in contexts:
        total += cooccurrence_delta(target, ctx, n_target)
    return total / len(contexts)


def delta(target, contexts, alpha: int, beta: int) -> float:
    """Averaged distance between two values of ``target`` over ``contexts``."""
    target = np.asarray(target)
    n_target = max(int(target.max()), alpha, beta) + 1
    return float(value_distances(target, contexts, n_target)[alpha, beta])


def mean_pair_distance(D: np.ndarray) -> float:
    """Mean over unordered value pairs; 0 when there is a single value."""
    X = D.shape[0]
    if X < 2:
        return 0.0
    iu = np.triu_indices(X, k=1)
    return float(D[iu].mean())


def numeric_weight(binned, contexts) -> float:
    """Significance of a numeric attribute from its discretized column.

    The binned codes are treated like a categorical attribute and the weight
    is the mean distance over all pairs of occupied bins.
    """
    binned = np.asarray(binned, dtype=np.int64)
    if int(binned.max()) == int(binned.min()):
        return 0.0
    return mean_pair_distance(value_distances(binned, contexts))


def build_model(ds: Dataset, bins: int | None = None) -> DistanceModel:
    """Compute every value-distance matrix and every numeric weight.

    Categorical attributes are the only targets whose matrices are used for
    clustering; discretized numeric attributes act as context and receive a
    weight. The result depends only on value counts, so it does not change
    when the rows are permuted.
    """
    if ds.n_attributes < 2:
        raise ModelError("value distances are undefined for a dataset with a single attribute")
    bins = default_bins(ds.schema.k or 2) if bins is None else bins
    disc = discretize(ds, bins)

    # coded view of every attribute, in schema order
    coded, sizes, refs = [], [], []
    for name, kind, j in ds.attributes:
        if kind == CATEGORICAL:
            coded.append(ds.categorical[:, j])
            sizes.append(len(ds.value_names[j]))
        else:
            coded.append(disc.codes[:, j])
            sizes.append(disc.n_bins[j])
        refs.append((name, kind, j))

    deltas, bin_deltas, weights, zero_support = [], [], [], []
    for pos, (name, kind, j) in enumerate(refs):
        contexts = [c for i, c in enumerate(coded) if i != pos]
        D = value_distances(coded[pos], contexts, sizes[pos])
        D.setflags(write=False)
        if kind == CATEGORICAL:
            counts = np.bincount(coded[pos], minlength=sizes[pos])
            zero_support.extend((name, int(a)) for a in np.flatnonzero(counts == 0))
            deltas.append(D)
        else:
            bin_deltas.append(D)
            weights.append(mean_pair_distance(D))
    w = np.array(weights, dtype=float)
    w.setflags(write=False)
    return DistanceModel(tuple(deltas), w, tuple(bin_deltas), disc, zero_support)
