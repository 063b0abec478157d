"""Shared builders for the test suite."""

import functools

import numpy as np

from initkmix import datasets
from initkmix.dataset import Schema, from_columns
from initkmix.experiment import prepare

BUNDLED = [d["name"] for d in datasets.manifest() if d["bundled"]]


def make_dataset(columns: dict, kinds: dict, k=2, name="toy"):
    schema = Schema.from_kinds(kinds, k=k)
    return from_columns(schema, columns, name=name)


def mixed_blobs(n, seed=0, k=2):
    """Synthetic mixed table: k numeric blobs with correlated categories."""
    rng = np.random.default_rng(seed)
    truth = rng.integers(0, k, n)
    x1 = truth * 3.0 + rng.normal(0, 0.5, n)
    x2 = rng.normal(0, 1, n)
    c1 = np.where(rng.random(n) < 0.9, truth, rng.integers(0, k, n))
    c2 = rng.integers(0, 3, n)
    cols = {
        "x1": x1.tolist(),
        "x2": x2.tolist(),
        "c1": [f"v{v}" for v in c1],
        "c2": [f"w{v}" for v in c2],
        "y": [str(v) for v in truth],
    }
    kinds = {"x1": "numeric", "x2": "numeric", "c1": "categorical", "c2": "categorical", "y": "label"}
    return make_dataset(cols, kinds, k=k, name=f"blobs{n}")


@functools.lru_cache(maxsize=None)
def prepared(name):
    raw = datasets.load(name)
    return prepare(raw, raw.schema.k)



# ---- independent oracles ---------------------------------------------------


def subset_delta(target, context, alpha, beta):
    """max over subsets w of context values of p(w|alpha) + p(~w|beta) - 1,
    by enumerating all 2^X subsets."""
    target = np.asarray(target)
    context = np.asarray(context)
    values = np.unique(context)
    a_rows, b_rows = context[target == alpha], context[target == beta]
    if len(a_rows) == 0 or len(b_rows) == 0:
        return 0.0
    pa = np.array([np.mean(a_rows == v) for v in values])
    pb = np.array([np.mean(b_rows == v) for v in values])
    X = len(values)
    masks = ((np.arange(2**X)[:, None] >> np.arange(X)) & 1).astype(bool)
    scores = (masks * pa).sum(axis=1) + (~masks * pb).sum(axis=1) - 1.0
    return float(scores.max())


def brute_accuracy(C):
    """Best total over all bijections of a square count matrix."""
    import itertools

    C = np.asarray(C)
    s = C.shape[0]
    return max(sum(C[i, p[i]] for i in range(s)) for p in itertools.permutations(range(s)))


def hyperedges(lm):
    lm = np.asarray(lm)
    return [np.flatnonzero(lm[:, r] == c) for r in range(lm.shape[1]) for c in np.unique(lm[:, r])]


def cut_size(lm, parts):
    parts = np.asarray(parts)
    return sum(len(set(parts[e].tolist())) > 1 for e in hyperedges(lm))


def brute_min_balanced_cut(lm, k=2, balance=1.2):
    """Smallest hyperedge cut over every row-level k-way split within the size cap."""
    import itertools

    n = len(lm)
    cap = balance * n / k
    best = None
    for tail in itertools.product(range(k), repeat=n - 1):
        p = np.array((0,) + tail)
        sizes = np.bincount(p, minlength=k)
        if sizes.min() == 0 or sizes.max() > cap + 1e-9:
            continue
        c = cut_size(lm, p)
        best = c if best is None else min(best, c)
    return best


def same_partition(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))


# ---- acceptance reporting ---------------------------------------------------

ACCEPTANCE: dict = {}


def report(number: int, ok: bool, detail: str) -> None:
    """Record and print one pass/fail line for an acceptance criterion."""
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
