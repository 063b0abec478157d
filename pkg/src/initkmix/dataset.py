"""Loading, validation and preprocessing of mixed numeric/categorical tables.

A :class:`Dataset` holds the numeric attributes as a float matrix and the
categorical attributes as integer codes. Category codes are assigned by
sorting the distinct value names, so the code books do not depend on the row
order of the source file.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"
LABEL = "label"
IGNORE = "ignore"
KINDS = (NUMERIC, CATEGORICAL, LABEL, IGNORE)

_KIND_ALIASES = {
    "num": NUMERIC,
    "numeric": NUMERIC,
    "continuous": NUMERIC,
    "real": NUMERIC,
    "cat": CATEGORICAL,
    "categorical": CATEGORICAL,
    "nominal": CATEGORICAL,
    "discrete": CATEGORICAL,
    "label": LABEL,
    "class": LABEL,
    "target": LABEL,
    "label-ignored": LABEL,
    "ignore": IGNORE,
    "skip": IGNORE,
}

CATEGORICAL_POLICIES = ("category", "mode", "error")

_DELIMITERS = {"comma": ",", "tab": "\t", "semicolon": ";", "space": None, "whitespace": None}


class SchemaError(ValueError):
    """Malformed schema manifest or a schema that does not fit the data."""


class DataError(ValueError):
    """A data file that cannot be parsed under its schema."""


@dataclass(frozen=True)
class Column:
    name: str
    kind: str


@dataclass(frozen=True)
class Schema:
    """Column kinds plus the file-format details needed to read the table.

    ``delimiter=None`` splits on runs of whitespace. ``missing_token`` and
    ``missing_categorical`` give the dataset's default :class:`MissingPolicy`.
    """

    columns: tuple[Column, ...]
    k: int | None = None
    header: bool = True
    delimiter: str | None = ","
    decimal: str = "."
    encoding: str = "utf-8"
    missing_token: str = "?"
    missing_categorical: str = "category"

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate column names: {dup}")
        for c in self.columns:
            if c.kind not in KINDS:
                raise SchemaError(f"unknown column kind {c.kind!r} for column {c.name!r}")
        if not any(c.kind in (NUMERIC, CATEGORICAL) for c in self.columns):
            raise SchemaError("schema has no numeric or categorical column")
        if sum(c.kind == LABEL for c in self.columns) > 1:
            raise SchemaError("at most one label column is allowed")
        if self.k is not None and self.k < 1:
            raise SchemaError(f"k must be a positive integer, got {self.k}")
        if self.missing_categorical not in CATEGORICAL_POLICIES:
            raise SchemaError(f"unknown categorical missing policy {self.missing_categorical!r}")

    def missing_policy(self) -> "MissingPolicy":
        return MissingPolicy(token=self.missing_token, categorical=self.missing_categorical)

    @property
    def attributes(self) -> list[Column]:
        return [c for c in self.columns if c.kind in (NUMERIC, CATEGORICAL)]

    @property
    def label(self) -> Column | None:
        return next((c for c in self.columns if c.kind == LABEL), None)

    @property
    def n_numeric(self) -> int:
        return sum(c.kind == NUMERIC for c in self.columns)

    @property
    def n_categorical(self) -> int:
        return sum(c.kind == CATEGORICAL for c in self.columns)

    @classmethod
    def from_kinds(cls, kinds: dict[str, str], **options) -> "Schema":
        return cls(tuple(Column(n, _parse_kind(k)) for n, k in kinds.items()), **options)


def _parse_kind(kind: str) -> str:
    try:
        return _KIND_ALIASES[kind.strip().lower()]
    except KeyError:
        raise SchemaError(f"unknown column kind {kind!r}") from None


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "y", "on"):
        return True
    if v in ("0", "false", "no", "n", "off"):
        return False
    raise SchemaError(f"not a boolean: {value!r}")


def _schema_options(raw: dict) -> dict:
    opts = {}
    for key, value in raw.items():
        key = key.lower()
        if key == "k":
            try:
                opts["k"] = int(value)
            except (TypeError, ValueError):
                raise SchemaError(f"k must be an integer, got {value!r}") from None
        elif key == "header":
            opts["header"] = _parse_bool(value)
        elif key == "delimiter":
            opts["delimiter"] = _DELIMITERS.get(str(value).lower(), value)
        elif key == "decimal":
            opts["decimal"] = str(value)
        elif key == "encoding":
            opts["encoding"] = str(value)
        elif key in ("missing", "missing_token", "missing-token"):
            opts["missing_token"] = str(value)
        elif key in ("missing_categorical", "missing-categorical"):
            opts["missing_categorical"] = str(value).lower()
        else:
            raise SchemaError(f"unknown schema directive {key!r}")
    return opts


def parse_schema(text: str) -> Schema:
    """Parse a schema manifest.

    Two formats are accepted. JSON::

        {"k": 2, "header": true,
         "columns": [{"name": "party", "kind": "label"}, ...]}

    or plain ``key: value`` lines, where ``@``-prefixed keys are directives
    (``@k``, ``@header``, ``@delimiter``, ``@decimal``, ``@encoding``,
    ``@missing-token``, ``@missing-categorical``) and
    every other line names a column and its kind, in file order. Lines
    starting with ``#`` are comments.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON schema: {exc}") from None
        cols = doc.pop("columns", None)
        if not isinstance(cols, list):
            raise SchemaError("JSON schema needs a 'columns' list")
        try:
            columns = tuple(Column(str(c["name"]), _parse_kind(str(c["kind"]))) for c in cols)
        except (KeyError, TypeError):
            raise SchemaError("each column needs 'name' and 'kind'") from None
        return Schema(columns, **_schema_options(doc))

    directives, columns = {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        # rpartition: column names may themselves contain ':'
        name, sep, value = line.rpartition(":")
        if not sep or not name.strip():
            raise SchemaError(f"line {lineno}: expected 'name: kind', got {line!r}")
        name, value = name.strip(), value.strip()
        if name.startswith("@"):
            directives[name[1:]] = value
        else:
            columns.append(Column(name, _parse_kind(value)))
    return Schema(tuple(columns), **_schema_options(directives))


def read_schema(path) -> Schema:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read schema {path}: {exc}") from exc
    return parse_schema(text)


@dataclass(frozen=True)
class MissingPolicy:
    """How missing cells are handled.

    Categorical missing cells become a category of their own (named by the
    token) or, with ``categorical="mode"``, take the column's most frequent
    observed value (ties go to the smallest value name). Numeric missing
    cells are replaced by the column mean of the observed values, or
    rejected with ``numeric="error"``.
    """

    token: str = "?"
    numeric: str = "mean"
    categorical: str = "category"

    def __post_init__(self):
        if self.numeric not in ("mean", "error"):
            raise ValueError(f"numeric missing policy must be 'mean' or 'error', got {self.numeric!r}")
        if self.categorical not in CATEGORICAL_POLICIES:
            raise ValueError(
                f"categorical missing policy must be one of {CATEGORICAL_POLICIES}, got {self.categorical!r}"
            )


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable mixed-attribute table.

    Attributes
    ----------
    numeric : (n, m_r) float array
    categorical : (n, m_c) int array of codes into ``value_names``
    value_names : per categorical column, the sorted tuple of value names
    target : optional (n,) int array of class codes into ``class_names``
    """

    schema: Schema
    numeric: np.ndarray
    categorical: np.ndarray
    value_names: tuple[tuple[str, ...], ...]
    target: np.ndarray | None = None
    class_names: tuple[str, ...] | None = None
    provenance: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "numeric", _readonly(np.asarray(self.numeric, dtype=float)))
        object.__setattr__(self, "categorical", _readonly(np.asarray(self.categorical, dtype=np.int64)))
        if self.target is not None:
            object.__setattr__(self, "target", _readonly(np.asarray(self.target, dtype=np.int64)))
        n = self.numeric.shape[0]
        if self.numeric.ndim != 2 or self.categorical.ndim != 2 or self.categorical.shape[0] != n:
            raise DataError("numeric and categorical blocks must be 2-D with the same number of rows")
        if self.numeric.shape[1] != self.schema.n_numeric:
            raise DataError("numeric block width does not match the schema")
        if self.categorical.shape[1] != self.schema.n_categorical:
            raise DataError("categorical block width does not match the schema")
        if len(self.value_names) != self.categorical.shape[1]:
            raise DataError("one code book per categorical column is required")
        if not np.all(np.isfinite(self.numeric)):
            raise DataError("numeric block contains NaN or infinite values")
        for j, names in enumerate(self.value_names):
            col = self.categorical[:, j]
            if len(names) < 1 or (n and (col.min() < 0 or col.max() >= len(names))):
                raise DataError(f"categorical column {j} has codes outside its code book")
        if self.target is not None and self.target.shape != (n,):
            raise DataError("target must have one entry per row")

    @property
    def n_samples(self) -> int:
        return self.numeric.shape[0]

    @property
    def n_numeric(self) -> int:
        return self.numeric.shape[1]

    @property
    def n_categorical(self) -> int:
        return self.categorical.shape[1]

    @property
    def n_attributes(self) -> int:
        return self.n_numeric + self.n_categorical

    @property
    def n_values(self) -> list[int]:
        return [len(v) for v in self.value_names]

    @property
    def attributes(self) -> list[tuple[str, str, int]]:
        """``(name, kind, block index)`` for every attribute, in schema order."""
        out, i_num, i_cat = [], 0, 0
        for c in self.schema.attributes:
            if c.kind == NUMERIC:
                out.append((c.name, NUMERIC, i_num))
                i_num += 1
            else:
                out.append((c.name, CATEGORICAL, i_cat))
                i_cat += 1
        return out

    def take(self, rows) -> "Dataset":
        """Row subset or permutation; code books are kept as they are."""
        rows = np.asarray(rows)
        return replace(
            self,
            numeric=self.numeric[rows],
            categorical=self.categorical[rows],
            target=None if self.target is None else self.target[rows],
        )


def exact_mean(values) -> float:
    """Mean that does not depend on the order of ``values``."""
    values = np.asarray(values, dtype=float)
    return math.fsum(values) / len(values)


def exact_std(values) -> float:
    """Population standard deviation, independent of element order."""
    values = np.asarray(values, dtype=float)
    mu = exact_mean(values)
    return math.sqrt(math.fsum((values - mu) ** 2) / len(values))


def _encode(values: list[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    names = tuple(sorted(set(values)))
    index = {v: i for i, v in enumerate(names)}
    return np.array([index[v] for v in values], dtype=np.int64), names


def from_columns(
    schema: Schema,
    columns: dict[str, list],
    missing: MissingPolicy | None = None,
    name: str = "",
    source: str | None = None,
) -> Dataset:
    """Build a Dataset from raw per-column cell values (strings or numbers).

    Numeric cells are parsed with the schema's decimal separator; cells equal
    to the missing token (or None/NaN) are handled by ``missing``.
    """
    missing = missing or schema.missing_policy()
    n = len(next(iter(columns.values()))) if columns else 0
    numeric, categorical, value_names = [], [], []
    imputed, cat_missing = {}, {}

    def is_missing(v) -> bool:
        if v is None:
            return True
        if isinstance(v, float) and math.isnan(v):
            return True
        return isinstance(v, str) and v.strip() == missing.token

    for col in schema.attributes:
        cells = columns[col.name]
        if len(cells) != n:
            raise DataError(f"column {col.name!r} has {len(cells)} cells, expected {n}")
        if col.kind == NUMERIC:
            vals = np.empty(n)
            miss = np.zeros(n, dtype=bool)
            for i, v in enumerate(cells):
                if is_missing(v):
                    miss[i] = True
                    continue
                try:
                    if isinstance(v, str):
                        v = v.strip()
                        if schema.decimal != ".":
                            v = v.replace(schema.decimal, ".")
                    vals[i] = float(v)
                except ValueError:
                    raise DataError(
                        f"row {i + 1}: cannot parse {v!r} in numeric column {col.name!r}"
                    ) from None
                if not math.isfinite(vals[i]):
                    raise DataError(f"row {i + 1}: non-finite value in numeric column {col.name!r}")
            if miss.any():
                if missing.numeric == "error":
                    raise DataError(f"numeric column {col.name!r} has {miss.sum()} missing cells")
                if miss.all():
                    raise DataError(f"numeric column {col.name!r} has no observed values")
                vals[miss] = exact_mean(vals[~miss])
                imputed[col.name] = int(miss.sum())
            numeric.append(vals)
        else:
            strs, holes = [], []
            for i, v in enumerate(cells):
                if is_missing(v):
                    if missing.categorical == "error":
                        raise DataError(f"row {i + 1}: missing value in categorical column {col.name!r}")
                    holes.append(i)
                    strs.append(missing.token)
                else:
                    strs.append(v.strip() if isinstance(v, str) else str(v))
            if holes:
                cat_missing[col.name] = len(holes)
                if missing.categorical == "mode":
                    gaps = set(holes)
                    observed = Counter(s for i, s in enumerate(strs) if i not in gaps)
                    if not observed:
                        raise DataError(f"categorical column {col.name!r} has no observed values")
                    fill = min(observed, key=lambda s: (-observed[s], s))
                    for i in holes:
                        strs[i] = fill
            codes, names = _encode(strs)
            categorical.append(codes)
            value_names.append(names)

    target = class_names = None
    label = schema.label
    if label is not None:
        cells = columns[label.name]
        target, class_names = _encode([str(v).strip() for v in cells])

    provenance = {
        "missing": {
            "token": missing.token,
            "numeric_imputed": imputed,
            "categorical_policy": missing.categorical,
            "categorical_missing": cat_missing,
        }
    }
    if source is not None:
        provenance["source"] = source
    return Dataset(
        schema=schema,
        numeric=np.column_stack(numeric) if numeric else np.empty((n, 0)),
        categorical=np.column_stack(categorical) if categorical else np.empty((n, 0), dtype=np.int64),
        value_names=tuple(value_names),
        target=target,
        class_names=class_names,
        provenance=provenance,
        name=name,
    )


def load_csv(path, schema: Schema, missing: MissingPolicy | None = None, name: str | None = None) -> Dataset:
    """Read a delimited text file under ``schema``.

    Raises
    ------
    DataError
        On a row whose width does not match the schema (the row number is
        reported) or an unparsable numeric cell.
    """
    path = Path(path)
    width = len(schema.columns)
    columns: dict[str, list] = {c.name: [] for c in schema.columns}
    with open(path, newline="", encoding=schema.encoding) as f:
        if schema.delimiter is None:
            rows = (line.split() for line in f)
        else:
            rows = csv.reader(f, delimiter=schema.delimiter)
        first = True
        for lineno, row in enumerate(rows, 1):
            if not row or all(not c.strip() for c in row):
                continue
            if first and schema.header:
                first = False
                header = [c.strip() for c in row]
                expected = [c.name for c in schema.columns]
                if header != expected:
                    raise SchemaError(f"{path}: header {header} does not match schema columns {expected}")
                continue
            first = False
            if len(row) != width:
                raise DataError(f"{path}: row {lineno} has {len(row)} fields, expected {width}")
            for c, v in zip(schema.columns, row):
                columns[c.name].append(v)
    if missing is None:
        missing = schema.missing_policy()
    return from_columns(schema, columns, missing, name=path.stem if name is None else name, source=str(path))


def normalize(ds: Dataset, method: str = "minmax") -> Dataset:
    """Rescale every numeric column.

    ``"minmax"`` maps each column onto [0, 1] (a constant column becomes all
    zeros); ``"zscore"`` centres and scales by the population standard
    deviation. The parameters used are recorded under
    ``provenance["normalization"]``.
    """
    if ds.n_numeric == 0:
        return ds
    X = ds.numeric
    out = np.empty_like(X)
    params = []
    for j in range(X.shape[1]):
        col = X[:, j]
        if method == "minmax":
            lo, hi = float(col.min()), float(col.max())
            out[:, j] = (col - lo) / (hi - lo) if hi > lo else 0.0
            params.append({"min": lo, "max": hi})
        elif method == "zscore":
            mu, sd = exact_mean(col), exact_std(col)
            out[:, j] = (col - mu) / sd if sd > 0 else 0.0
            params.append({"mean": mu, "std": sd})
        else:
            raise ValueError(f"unknown normalization {method!r}; use 'minmax' or 'zscore'")
    names = [c.name for c in ds.schema.attributes if c.kind == NUMERIC]
    provenance = dict(ds.provenance)
    provenance["normalization"] = {"method": method, "columns": dict(zip(names, params))}
    return replace(ds, numeric=out, provenance=provenance)


@dataclass(frozen=True, eq=False)
class Discretization:
    """Equal-width binning of the numeric columns.

    ``edges[j]`` are the ``bins + 1`` edges of column ``j``; ``occupied[j]``
    lists the bins that received at least one row. ``codes`` index into
    ``occupied``, so empty bins never appear as a value.
    """

    edges: tuple[np.ndarray, ...]
    occupied: tuple[np.ndarray, ...]
    codes: np.ndarray
    bins: int

    @property
    def n_bins(self) -> list[int]:
        return [len(o) for o in self.occupied]


def default_bins(k: int) -> int:
    return max(int(k), 4)


def discretize(ds: Dataset, bins: int) -> Discretization:
    """Equal-width bins between each column's minimum and maximum.

    After min-max normalization that range is [0, 1]. A constant column lands
    in a single bin.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    n = ds.n_samples
    edges, occupied, codes = [], [], np.zeros((n, ds.n_numeric), dtype=np.int64)
    for j in range(ds.n_numeric):
        col = ds.numeric[:, j]
        lo, hi = float(col.min()), float(col.max())
        if hi > lo:
            idx = np.floor((col - lo) / (hi - lo) * bins).astype(np.int64)
            np.clip(idx, 0, bins - 1, out=idx)
            edges.append(np.linspace(lo, hi, bins + 1))
        else:
            idx = np.zeros(n, dtype=np.int64)
            edges.append(np.linspace(lo, lo + 1.0, bins + 1))
        used, compact = np.unique(idx, return_inverse=True)
        occupied.append(used)
        codes[:, j] = compact.reshape(-1)
    codes.setflags(write=False)
    return Discretization(tuple(edges), tuple(occupied), codes, bins)
