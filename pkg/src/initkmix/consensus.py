"""Cluster-ensemble consensus: HGPA, MCLA and (A)NMI scoring.

Both consensus functions first collapse rows with identical label strings
(the same label in every run) into one weighted unit. Those rows cannot be
told apart by any run, so they always share a consensus label, and the
result is equivariant under row permutations: unit order is the
lexicographic order of the label strings, never the row order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partition import EXACT_LIMIT, Hypergraph, overflow, partition, rebalance

HGPA = "HGPA"
MCLA = "MCLA"


def check_label_matrix(runs) -> np.ndarray:
    """Validate an ``(n, m)`` label matrix and relabel each run densely.

    Dense relabelling keeps the relative order of the original labels.
    """
    runs = np.asarray(runs)
    if runs.ndim == 1:
        runs = runs[:, None]
    if runs.ndim != 2 or runs.shape[1] == 0:
        raise ValueError("label matrix must be 2-D with at least one run")
    if runs.shape[0] == 0:
        raise ValueError("label matrix has no rows")
    out = np.empty(runs.shape, dtype=np.int64)
    for r in range(runs.shape[1]):
        _, inv = np.unique(runs[:, r], return_inverse=True)
        out[:, r] = inv.reshape(-1)
    return out


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(a, b) -> float:
    """Normalized mutual information with geometric-mean normalization.

    If either labelling is constant the score is 1 when both describe the
    same set partition and 0 otherwise.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"label vectors must be 1-D with equal length, got {a.shape} and {b.shape}")
    n = len(a)
    if n == 0:
        raise ValueError("empty label vectors")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    ai, bi = ai.reshape(-1), bi.reshape(-1)
    ka, kb = ai.max() + 1, bi.max() + 1
    C = np.bincount(ai * kb + bi, minlength=ka * kb).reshape(ka, kb)
    nz = C > 0
    if nz.sum(axis=0).max() == 1 and nz.sum(axis=1).max() == 1:
        # one-to-one correspondence: the same set partition
        return 1.0
    ha, hb = _entropy(C.sum(axis=1), n), _entropy(C.sum(axis=0), n)
    if ha == 0.0 or hb == 0.0:
        return 0.0
    pij = C[nz] / n
    pa = (C.sum(axis=1) / n)[np.nonzero(nz)[0]]
    pb = (C.sum(axis=0) / n)[np.nonzero(nz)[1]]
    mi = float((pij * np.log(pij / (pa * pb))).sum())
    return float(np.clip(mi / np.sqrt(ha * hb), 0.0, 1.0))


def anmi(candidate, runs) -> float:
    """Mean NMI between ``candidate`` and every run (column) of ``runs``."""
    runs = np.asarray(runs)
    if runs.ndim == 1:
        runs = runs[:, None]
    if runs.size == 0 or runs.shape[1] == 0:
        raise ValueError("empty label matrix")
    return float(np.mean([nmi(candidate, runs[:, r]) for r in range(runs.shape[1])]))


def _units(runs: np.ndarray):
    strings, inverse, counts = np.unique(runs, axis=0, return_inverse=True, return_counts=True)
    return strings, inverse.reshape(-1), counts


def _split_fewer_units(labels: np.ndarray, n_parts: int, k: int) -> np.ndarray:
    # Fewer distinct label strings than k: peel rows off the largest cluster.
    # Only this degenerate case looks at row positions.
    labels = labels.copy()
    for j in range(n_parts, k):
        sizes = np.bincount(labels, minlength=k)
        donor = int(np.argmax(sizes))
        if sizes[donor] < 2:
            raise ValueError(f"cannot form {k} clusters from {len(labels)} rows")
        labels[np.flatnonzero(labels == donor)[-1]] = j
    return labels


def hypergraph_of(strings: np.ndarray, counts: np.ndarray) -> Hypergraph:
    """One vertex per label string, one unit-weight hyperedge per cluster per run."""
    edges = []
    for r in range(strings.shape[1]):
        col = strings[:, r]
        for c in np.unique(col):
            edges.append(np.flatnonzero(col == c))
    return Hypergraph(len(strings), edges, vertex_weights=counts)


def hgpa(runs, k: int, balance: float = 1.2, **partition_options) -> np.ndarray:
    """Consensus by balanced min-cut partitioning of the cluster hypergraph.

    The cut is minimized over label-string units first; if no split into
    whole units satisfies the size cap, rows of a unit are separated.

    Raises
    ------
    ValueError
        If ``k`` exceeds the number of rows.
    """
    runs = check_label_matrix(runs)
    n = runs.shape[0]
    if k > n:
        raise ValueError(f"cannot form {k} clusters from {n} rows")
    strings, inverse, counts = _units(runs)
    V = len(strings)
    if V < k:
        labels = _split_fewer_units(np.arange(V)[inverse], V, k)
    else:
        graph = hypergraph_of(strings, counts)
        labels = partition(graph, k, balance, **partition_options)[inverse]
    rows = hypergraph_of(runs, np.ones(n))
    if overflow(rows, labels, k, balance) <= 0.0:
        return labels
    # Whole units cannot meet the size cap: split them at row level. Only this
    # fallback looks at row positions.
    limit = partition_options.get("exact_limit", EXACT_LIMIT)
    if k**n <= limit:
        return partition(rows, k, balance, **partition_options)
    return rebalance(rows, labels, k, balance)


def meta_graph(strings: np.ndarray, counts: np.ndarray):
    """Indicator matrix of every cluster of every run and their Jaccard similarities.

    Returns ``(H, J)``: ``H`` is ``(M, V)`` binary over label-string units,
    ``J`` is the ``(M, M)`` Jaccard matrix (weighted by unit counts) with a
    zero diagonal.
    """
    rows = []
    for r in range(strings.shape[1]):
        col = strings[:, r]
        for c in np.unique(col):
            rows.append(col == c)
    H = np.array(rows, dtype=float)
    inter = (H * counts) @ H.T
    size = H @ counts
    union = size[:, None] + size[None, :] - inter
    J = np.divide(inter, union, out=np.zeros_like(inter), where=union > 0)
    np.fill_diagonal(J, 0.0)
    return H, J


def mcla(runs, k: int, balance: float = 1.2, **partition_options) -> np.ndarray:
    """Consensus by grouping similar clusters into ``k`` meta-clusters.

    Each unit goes to the meta-cluster it is most associated with (mean
    membership over the meta-cluster's clusters); ties go to the lower
    index. A meta-cluster that wins no unit takes the unit most associated
    with it from a cluster that can spare one.
    """
    runs = check_label_matrix(runs)
    n = runs.shape[0]
    if k > n:
        raise ValueError(f"cannot form {k} clusters from {n} rows")
    strings, inverse, counts = _units(runs)
    H, J = meta_graph(strings, counts)
    M = H.shape[0]
    if M < k:
        raise ValueError(f"the runs hold {M} clusters in total, fewer than k={k}")
    iu, ju = np.nonzero(np.triu(J, 1))
    graph = Hypergraph(M, np.stack([iu, ju], axis=1), edge_weights=J[iu, ju])
    meta = partition(graph, k, balance, **partition_options)
    assoc = np.vstack([H[meta == g].mean(axis=0) for g in range(k)])
    unit_labels = assoc.argmax(axis=0)
    V = len(strings)
    if V < k:
        return _split_fewer_units(np.arange(V)[inverse], V, k)
    sizes = np.bincount(unit_labels, minlength=k)
    for g in np.flatnonzero(sizes == 0):
        spare = sizes[unit_labels] > 1
        cand = np.where(spare, assoc[g], -np.inf)
        u = int(np.argmax(cand))
        sizes[unit_labels[u]] -= 1
        unit_labels[u] = g
        sizes[g] += 1
    return unit_labels[inverse]


@dataclass(frozen=True, eq=False)
class ConsensusResult:
    labels: np.ndarray
    method: str
    scores: dict


def combine(runs, k: int, balance: float = 1.2, tol: float = 1e-12, **partition_options) -> ConsensusResult:
    """Run HGPA and MCLA and keep the one with the higher ANMI against ``runs``.

    A tie (within ``tol``) goes to HGPA.
    """
    runs = check_label_matrix(runs)
    candidates = {
        HGPA: hgpa(runs, k, balance, **partition_options),
        MCLA: mcla(runs, k, balance, **partition_options),
    }
    scores = {name: anmi(labels, runs) for name, labels in candidates.items()}
    method = MCLA if scores[MCLA] > scores[HGPA] + tol else HGPA
    return ConsensusResult(candidates[method], method, scores)
