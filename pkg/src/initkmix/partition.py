"""Balanced k-way partitioning of weighted hypergraphs.

Minimizes the total weight of cut hyperedges (a hyperedge is cut when its
pins fall into more than one part) subject to every part weighing at most
``balance * W / k``, where ``W`` is the total vertex weight. Ordinary graphs
are the special case of two-pin hyperedges.

Small instances are solved exactly by enumeration. Larger ones use greedy
growth from deterministic seeds followed by k-way Fiduccia-Mattheyses
passes. Every choice breaks ties by the lowest vertex index and then the
lowest part index, so the result is a pure function of the input.
"""

from __future__ import annotations

import itertools

import numpy as np

EXACT_LIMIT = 4096
_EPS = 1e-12


class Hypergraph:
    """Vertices ``0..V-1`` with weights, hyperedges as arrays of vertex ids."""

    def __init__(self, n_vertices: int, edges, edge_weights=None, vertex_weights=None):
        self.n_vertices = int(n_vertices)
        edges = [np.unique(np.asarray(e, dtype=np.int64)) for e in edges]
        edges = [e for e in edges if len(e)]
        self.edges = edges
        self.edge_weights = (
            np.ones(len(edges)) if edge_weights is None else np.asarray(edge_weights, dtype=float)
        )
        if len(self.edge_weights) != len(edges):
            raise ValueError("one weight per non-empty edge is required")
        self.vertex_weights = (
            np.ones(self.n_vertices) if vertex_weights is None else np.asarray(vertex_weights, dtype=float)
        )
        sizes = np.array([len(e) for e in edges], dtype=np.int64)
        self.edge_sizes = sizes
        self.pin_edge = np.repeat(np.arange(len(edges)), sizes) if edges else np.zeros(0, np.int64)
        self.pin_vertex = np.concatenate(edges) if edges else np.zeros(0, np.int64)
        # vertex -> incident edges
        order = np.argsort(self.pin_vertex, kind="stable")
        self._inc_edges = self.pin_edge[order]
        self._inc_ptr = np.searchsorted(self.pin_vertex[order], np.arange(self.n_vertices + 1))

    def incident(self, v: int) -> np.ndarray:
        return self._inc_edges[self._inc_ptr[v] : self._inc_ptr[v + 1]]

    def pin_counts(self, parts: np.ndarray, k: int) -> np.ndarray:
        E = len(self.edges)
        flat = self.pin_edge * k + parts[self.pin_vertex]
        return np.bincount(flat, minlength=E * k).reshape(E, k)

    def cut(self, parts: np.ndarray, k: int) -> float:
        cnt = self.pin_counts(parts, k)
        spans = (cnt > 0).sum(axis=1) > 1
        return float(self.edge_weights[spans].sum())


def capacity(graph: Hypergraph, k: int, balance: float) -> float:
    return balance * graph.vertex_weights.sum() / k


def overflow(graph: Hypergraph, parts: np.ndarray, k: int, balance: float) -> float:
    pw = np.bincount(parts, weights=graph.vertex_weights, minlength=k)
    return float(np.maximum(pw - capacity(graph, k, balance), 0.0).sum())


def _canonical_assignments(V: int, k: int):
    """Assignments where part ``p`` first appears before part ``p + 1``."""
    if V == 0:
        return
    for tail in itertools.product(range(k), repeat=V - 1):
        parts = (0,) + tail
        seen = 0
        ok = True
        for p in parts:
            if p > seen:
                ok = False
                break
            if p == seen:
                seen += 1
        if ok and seen == k:
            yield parts


def _exact(graph: Hypergraph, k: int, balance: float) -> np.ndarray:
    best, best_key = None, None
    for parts in _canonical_assignments(graph.n_vertices, k):
        p = np.array(parts, dtype=np.int64)
        key = (round(overflow(graph, p, k, balance), 9), round(graph.cut(p, k), 9))
        if best_key is None or key < best_key:
            best, best_key = p, key
    return best


def _greedy(graph: Hypergraph, k: int, cap: float) -> np.ndarray:
    V = graph.n_vertices
    vw = graph.vertex_weights
    parts = np.full(V, -1, dtype=np.int64)
    pw = np.zeros(k)
    # affinity[v, p]: weighted share of v's edges already placed in p
    affinity = np.zeros((V, k))
    share = graph.edge_weights / np.maximum(graph.edge_sizes, 1)

    def place(v, p):
        parts[v] = p
        pw[p] += vw[v]
        for e in graph.incident(v):
            affinity[graph.edges[e], p] += share[e]

    # seeds: heaviest vertex first, then the vertex least attached to the seeds so far
    place(int(np.argmax(vw)), 0)
    for p in range(1, k):
        free = np.flatnonzero(parts < 0)
        attach = affinity[free].sum(axis=1)
        # lexsort: last key is primary
        order = np.lexsort((free, -vw[free], attach))
        place(int(free[order[0]]), p)

    remaining = V - k
    while remaining:
        score = np.where(parts[:, None] < 0, affinity, -np.inf)
        full = pw[None, :] + vw[:, None] > cap + _EPS
        score = np.where(full, -np.inf, score)
        flat = int(np.argmax(score))
        v, p = divmod(flat, k)
        if not np.isfinite(score[v, p]):
            # nothing fits anywhere: indivisible weights, put the next vertex in the lightest part
            v = int(np.flatnonzero(parts < 0)[0])
            p = int(np.argmin(pw))
        place(v, p)
        remaining -= 1
    return parts


def _gains(graph: Hypergraph, parts: np.ndarray, k: int) -> np.ndarray:
    """``(V, k)`` reduction in cut weight from moving each vertex to each part."""
    V = graph.n_vertices
    cnt = graph.pin_counts(parts, k)
    size = graph.edge_sizes
    w = graph.edge_weights
    pe, pv = graph.pin_edge, graph.pin_vertex
    home = cnt[pe, parts[pv]]
    multi = size[pe] > 1
    # an uncut edge becomes cut when any pin leaves
    loss = np.bincount(pv, weights=w[pe] * ((home == size[pe]) & multi), minlength=V)
    # an edge becomes uncut when its only pin outside part q moves into q
    sole = (home == 1) & multi
    joinable = w[:, None] * (cnt == (size - 1)[:, None])
    gain = np.zeros((V, k))
    np.add.at(gain, pv[sole], joinable[pe[sole]])
    G = gain - loss[:, None]
    G[np.arange(V), parts] = -np.inf
    return G


def _fm_pass(graph: Hypergraph, parts: np.ndarray, k: int, cap: float, patience: int) -> tuple[np.ndarray, float]:
    V = graph.n_vertices
    vw = graph.vertex_weights
    parts = parts.copy()
    pw = np.bincount(parts, weights=vw, minlength=k)
    members = np.bincount(parts, minlength=k)
    locked = np.zeros(V, dtype=bool)
    moves, cum, best, best_len = [], 0.0, 0.0, 0
    while True:
        G = _gains(graph, parts, k)
        limit = np.maximum(cap, pw[parts])[:, None]
        feasible = (pw[None, :] + vw[:, None] <= limit + _EPS) & ~locked[:, None]
        feasible &= (members[parts] > 1)[:, None]
        G = np.where(feasible, G, -np.inf)
        flat = int(np.argmax(G))
        v, q = divmod(flat, k)
        g = G[v, q]
        if not np.isfinite(g):
            break
        p = parts[v]
        parts[v] = q
        pw[p] -= vw[v]
        pw[q] += vw[v]
        members[p] -= 1
        members[q] += 1
        locked[v] = True
        moves.append((v, p))
        cum += g
        if cum > best + _EPS:
            best, best_len = cum, len(moves)
        elif len(moves) - best_len >= patience:
            break
    for v, p in reversed(moves[best_len:]):
        parts[v] = p
    return parts, best


def rebalance(graph: Hypergraph, parts: np.ndarray, k: int, balance: float) -> np.ndarray:
    """Move vertices out of over-full parts until every part fits the cap.

    Each step moves the vertex of the heaviest over-full part whose move to
    a part with room loses the least cut weight; ties go to the lowest
    vertex, then the lowest part.
    """
    parts = parts.copy()
    vw = graph.vertex_weights
    cap = capacity(graph, k, balance)
    pw = np.bincount(parts, weights=vw, minlength=k)
    while np.any(pw > cap + _EPS):
        p = int(np.argmax(pw))
        G = _gains(graph, parts, k)
        fits = pw[None, :] + vw[:, None] <= cap + _EPS
        G = np.where(fits & (parts == p)[:, None], G, -np.inf)
        flat = int(np.argmax(G))
        v, q = divmod(flat, k)
        if not np.isfinite(G[v, q]):
            break
        parts[v] = q
        pw[p] -= vw[v]
        pw[q] += vw[v]
    return parts


def partition(
    graph: Hypergraph,
    k: int,
    balance: float = 1.2,
    passes: int = 3,
    patience: int = 50,
    exact_limit: int = EXACT_LIMIT,
) -> np.ndarray:
    """Split the vertices into ``k`` non-empty parts with a small cut.

    Parameters
    ----------
    balance : each part may weigh up to ``balance * W / k``; weights that
        cannot be split are allowed to overshoot when nothing else fits
    passes : maximum number of refinement passes
    patience : a pass stops after this many moves without a new best cut
    exact_limit : instances with ``k ** V`` at most this value are enumerated
    """
    V = graph.n_vertices
    if k < 1:
        raise ValueError("k must be >= 1")
    if V < k:
        raise ValueError(f"cannot split {V} vertices into {k} non-empty parts")
    if balance < 1.0:
        raise ValueError("balance must be >= 1")
    if k == 1:
        return np.zeros(V, dtype=np.int64)
    if k**V <= exact_limit:
        return _exact(graph, k, balance)
    cap = capacity(graph, k, balance)
    parts = _greedy(graph, k, cap)
    for _ in range(passes):
        parts, improved = _fm_pass(graph, parts, k, cap, patience)
        if improved <= _EPS:
            break
    return parts
