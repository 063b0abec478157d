"""Clustering accuracy against ground truth, and its mean and spread over runs."""

from __future__ import annotations

import statistics

import numpy as np
from scipy.optimize import linear_sum_assignment


def contingency(labels, truth):
    """Cluster-by-class count matrix.

    Returns ``(C, clusters, classes)`` with rows ordered by sorted cluster
    label and columns by sorted class label.
    """
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    if labels.shape != truth.shape or labels.ndim != 1:
        raise ValueError(f"labels and truth must be 1-D with equal length, got {labels.shape} and {truth.shape}")
    if len(labels) == 0:
        raise ValueError("empty label vectors")
    clusters, li = np.unique(labels, return_inverse=True)
    classes, ti = np.unique(truth, return_inverse=True)
    li, ti = li.reshape(-1), ti.reshape(-1)
    C = np.bincount(li * len(classes) + ti, minlength=len(clusters) * len(classes))
    return C.reshape(len(clusters), len(classes)), clusters, classes


def _best_total(C: np.ndarray) -> int:
    if C.size == 0:
        return 0
    r, c = linear_sum_assignment(C, maximize=True)
    return int(C[r, c].sum())


def best_mapping(C: np.ndarray) -> tuple[int, list[int]]:
    """Optimal one-to-one row-to-column assignment of a square count matrix.

    Among all optimal assignments the lexicographically smallest column
    sequence is returned.
    """
    C = np.asarray(C, dtype=np.int64)
    s = C.shape[0]
    total = _best_total(C)
    rows, cols = list(range(s)), list(range(s))
    mapping, acc = [], 0
    for i in range(s):
        rest_rows = rows[i + 1 :]
        for j in sorted(cols):
            rest_cols = [c for c in cols if c != j]
            sub = C[np.ix_(rest_rows, rest_cols)]
            if acc + C[i, j] + _best_total(sub) == total:
                mapping.append(j)
                acc += int(C[i, j])
                cols = rest_cols
                break
    return total, mapping


def accuracy(labels, truth) -> tuple[float, dict]:
    """Fraction of rows on the majority class of their cluster under the best
    one-to-one cluster-to-class map.

    When the number of clusters and classes differ the count matrix is
    padded with zeros, so some clusters (or classes) stay unmapped.

    Returns
    -------
    (ac, mapping)
        ``mapping`` sends cluster labels to class labels.
    """
    C, clusters, classes = contingency(labels, truth)
    s = max(C.shape)
    padded = np.zeros((s, s), dtype=np.int64)
    padded[: C.shape[0], : C.shape[1]] = C
    total, cols = best_mapping(padded)
    mapping = {
        clusters[i].item(): classes[j].item()
        for i, j in enumerate(cols)
        if i < len(clusters) and j < len(classes)
    }
    return total / len(np.asarray(labels)), mapping


def mean_accuracy(acs) -> float:
    acs = list(acs)
    if not acs:
        raise ValueError("no accuracies given")
    return statistics.fmean(acs)


def accuracy_sd(acs) -> float:
    """Population standard deviation (divisor T)."""
    acs = list(acs)
    if not acs:
        raise ValueError("no accuracies given")
    return statistics.pstdev(acs)
