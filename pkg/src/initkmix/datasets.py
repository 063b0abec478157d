"""Registry of the benchmark datasets and their reference results.

Five tables ship with the package. The others (Soybean-small, Mushroom,
Acute Inflammations, Heart Statlog) have schemas only; drop the original
files into a directory named by ``INITKMIX_DATA_DIR`` to use them.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .dataset import Dataset, Schema, load_csv, read_schema

DATA_DIR = Path(__file__).resolve().parent / "data"
DATA_ENV = "INITKMIX_DATA_DIR"


class DatasetUnavailable(FileNotFoundError):
    pass


def manifest() -> list[dict]:
    with open(DATA_DIR / "manifest.json", encoding="utf-8") as f:
        return json.load(f)["datasets"]


def names() -> list[str]:
    return [d["name"] for d in manifest()]


def entry(name: str) -> dict:
    for d in manifest():
        if d["name"] == name:
            return d
    raise KeyError(f"unknown dataset {name!r}; known: {names()}")


def schema(name: str) -> Schema:
    return read_schema(DATA_DIR / entry(name)["schema"])


def _search_dirs() -> list[Path]:
    dirs = []
    extra = os.environ.get(DATA_ENV)
    if extra:
        dirs.extend(Path(p) for p in extra.split(os.pathsep) if p)
    dirs.append(DATA_DIR)
    return dirs


def find_file(name: str) -> Path | None:
    """First existing data file for ``name``, user directories first."""
    files = entry(name)["files"]
    for d in _search_dirs():
        for f in files:
            p = d / f
            if p.is_file():
                return p
    return None


def available(name: str) -> bool:
    return find_file(name) is not None


def load(name: str) -> Dataset:
    """Load a registered dataset (not normalized).

    Raises
    ------
    DatasetUnavailable
        If no data file is found.
    """
    path = find_file(name)
    if path is None:
        raise DatasetUnavailable(
            f"no data file for {name!r}; put one of {entry(name)['files']} in ${DATA_ENV}"
        )
    return load_csv(path, schema(name), name=name)


def reference(name: str) -> dict:
    return dict(entry(name)["reference"])
