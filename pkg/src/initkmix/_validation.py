"""Turn user-supplied tables (arrays, lists, DataFrames) into a Dataset."""

from __future__ import annotations

import math
import numbers

import numpy as np

from .dataset import CATEGORICAL, NUMERIC, Column, Dataset, MissingPolicy, Schema, from_columns


def _is_missing(v, token) -> bool:
    if v is None:
        return True
    if isinstance(v, float) and math.isnan(v):
        return True
    return isinstance(v, str) and v.strip() == token


def _looks_numeric(cells, token) -> bool:
    seen = False
    for v in cells:
        if _is_missing(v, token):
            continue
        if isinstance(v, (bool, np.bool_)):
            return False
        if isinstance(v, numbers.Real):
            seen = True
            continue
        return False
    return seen


def _columns_of(X):
    """``(names, list of cell lists, dtype kinds or None)`` for a 2-D table."""
    if hasattr(X, "columns") and hasattr(X, "dtypes"):
        names = [str(c) for c in X.columns]
        cells = [X[c].tolist() for c in X.columns]
        kinds = []
        for dt in X.dtypes:
            kind = getattr(dt, "kind", "O")
            kinds.append(NUMERIC if kind in "iuf" else CATEGORICAL)
        return names, cells, kinds
    arr = np.asarray(X, dtype=object) if not isinstance(X, np.ndarray) else X
    if arr.ndim == 1:
        raise ValueError("expected a 2-D table; reshape a single feature with X.reshape(-1, 1)")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D table, got {arr.ndim} dimensions")
    names = [f"x{j}" for j in range(arr.shape[1])]
    cells = [arr[:, j].tolist() for j in range(arr.shape[1])]
    kinds = [NUMERIC] * arr.shape[1] if arr.dtype.kind in "iuf" else None
    return names, cells, kinds


def resolve_kinds(names, cells, dtype_kinds, categorical_features="auto", token="?") -> list[str]:
    """Decide the kind of every column.

    ``categorical_features`` is ``"auto"`` (non-numeric columns are
    categorical), a boolean mask, or a list of column indices or names.
    """
    m = len(names)
    if isinstance(categorical_features, str):
        if categorical_features != "auto":
            raise ValueError(f"categorical_features must be 'auto', a mask or a list, got {categorical_features!r}")
        if dtype_kinds is not None:
            return list(dtype_kinds)
        return [NUMERIC if _looks_numeric(c, token) else CATEGORICAL for c in cells]
    if categorical_features is None:
        return [NUMERIC] * m
    spec = list(categorical_features)
    if spec and all(isinstance(s, (bool, np.bool_)) for s in spec):
        if len(spec) != m:
            raise ValueError(f"categorical mask has {len(spec)} entries for {m} columns")
        return [CATEGORICAL if s else NUMERIC for s in spec]
    chosen = set()
    for s in spec:
        if isinstance(s, (numbers.Integral, np.integer)):
            if not -m <= s < m:
                raise ValueError(f"categorical feature index {s} out of range for {m} columns")
            chosen.add(int(s) % m)
        elif str(s) in names:
            chosen.add(names.index(str(s)))
        else:
            raise ValueError(f"unknown categorical feature {s!r}")
    return [CATEGORICAL if j in chosen else NUMERIC for j in range(m)]


def check_mixed_input(X, categorical_features="auto", missing: MissingPolicy | None = None, k=None) -> Dataset:
    """Validate a mixed table and encode it as a Dataset (no normalization).

    Missing cells are ``None``, ``NaN`` or the policy's token.
    """
    missing = missing or MissingPolicy()
    names, cells, dtype_kinds = _columns_of(X)
    if not names:
        raise ValueError("X has no columns")
    if not cells[0]:
        raise ValueError("X has no rows")
    kinds = resolve_kinds(names, cells, dtype_kinds, categorical_features, missing.token)
    schema = Schema(tuple(Column(n, kd) for n, kd in zip(names, kinds)), k=k)
    return from_columns(schema, dict(zip(names, cells)), missing, name="input")


def encode_like(ds: Dataset, X, missing: MissingPolicy | None = None):
    """Encode new rows with a fitted dataset's column kinds and code books.

    Returns ``(numeric, codes)``; an unseen or missing categorical value gets
    code ``-1``. Missing numeric cells are NaN.
    """
    missing = missing or MissingPolicy()
    names, cells, _ = _columns_of(X)
    cols = ds.schema.attributes
    if len(names) != len(cols):
        raise ValueError(f"X has {len(names)} columns, the model was fitted on {len(cols)}")
    n = len(cells[0]) if cells else 0
    numeric = np.empty((n, ds.n_numeric))
    codes = np.empty((n, ds.n_categorical), dtype=np.int64)
    i_num = i_cat = 0
    for c, col in zip(cols, cells):
        if c.kind == NUMERIC:
            out = numeric[:, i_num]
            for i, v in enumerate(col):
                if _is_missing(v, missing.token):
                    out[i] = np.nan
                else:
                    try:
                        out[i] = float(v.strip() if isinstance(v, str) else v)
                    except (TypeError, ValueError):
                        raise ValueError(f"row {i}: cannot parse {v!r} in numeric column {c.name!r}") from None
            i_num += 1
        else:
            book = {name: code for code, name in enumerate(ds.value_names[i_cat])}
            for i, v in enumerate(col):
                key = missing.token if _is_missing(v, missing.token) else (v.strip() if isinstance(v, str) else str(v))
                codes[i, i_cat] = book.get(key, -1)
            i_cat += 1
    return numeric, codes
