"""Experiment harness: initKmix versus random starts, per-attribute reports,
and benchmark tables."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import datasets
from .codist import DistanceModel, build_model
from .dataset import Dataset, default_bins, load_csv, normalize, read_schema
from .initkmix import attribute_runs, run_initkmix
from .kmcmd import iterate, random_partition
from .metrics import accuracy, accuracy_sd, mean_accuracy

INITKMIX = "initkmix"
RANDOM = "random"


class DeterminismError(RuntimeError):
    """Repeated initKmix runs disagreed."""


@dataclass(eq=False)
class RunReport:
    dataset: str
    method: str
    k: int
    provenance: dict
    labels: list = field(default_factory=list)
    acs: list = field(default_factory=list)
    n_iter: list = field(default_factory=list)
    converged: list = field(default_factory=list)
    seconds: list = field(default_factory=list)
    consensus_method: str | None = None
    anmi_scores: dict | None = None
    seed: int | None = None

    @property
    def mean_ac(self) -> float | None:
        return mean_accuracy(self.acs) if self.acs else None

    @property
    def sd(self) -> float | None:
        return accuracy_sd(self.acs) if self.acs else None

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "method": self.method,
            "k": self.k,
            "seed": self.seed,
            "provenance": self.provenance,
            "acs": self.acs,
            "mean_ac": self.mean_ac,
            "sd": self.sd,
            "consensus_method": self.consensus_method,
            "anmi_scores": self.anmi_scores,
            "n_iter": self.n_iter,
            "converged": self.converged,
            "seconds": self.seconds,
        }


def prepare(ds: Dataset, k: int, normalization: str = "minmax", bins: int | None = None):
    """Normalize and build the distance model; returns ``(ds, model)``."""
    ds = normalize(ds, normalization)
    bins = default_bins(k) if bins is None else bins
    model = build_model(ds, bins)
    prov = dict(ds.provenance)
    prov["bins"] = bins
    prov["n_bins"] = model.discretization.n_bins
    return replace(ds, provenance=prov), model


def _ac(ds: Dataset, labels) -> float | None:
    return None if ds.target is None else accuracy(labels, ds.target)[0]


def _record(report: RunReport, ds: Dataset, result, t0: float):
    report.labels.append(result.labels)
    ac = _ac(ds, result.labels)
    if ac is not None:
        report.acs.append(ac)
    report.n_iter.append(result.n_iter)
    report.converged.append(result.converged)
    report.seconds.append(time.perf_counter() - t0)


def random_runs(
    ds: Dataset,
    model: DistanceModel,
    k: int,
    repeats: int = 50,
    seed: int = 0,
    max_iter: int = 100,
    square_weights: bool = True,
) -> RunReport:
    """KMCMD from ``repeats`` random partitions.

    Run ``r`` draws from the ``r``-th child of ``SeedSequence(seed)``, so any
    single run can be reproduced without replaying the others.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    report = RunReport(ds.name, RANDOM, k, ds.provenance, seed=seed)
    for child in np.random.SeedSequence(seed).spawn(repeats):
        t0 = time.perf_counter()
        start = random_partition(ds.n_samples, k, np.random.default_rng(child))
        _record(report, ds, iterate(ds, model, start, k, max_iter, square_weights), t0)
    return report


def initkmix_runs(
    ds: Dataset,
    model: DistanceModel,
    k: int,
    repeats: int = 1,
    max_iter: int = 100,
    balance: float = 1.2,
    square_weights: bool = True,
) -> RunReport:
    """The full initKmix + KMCMD pipeline, run ``repeats`` times from scratch.

    Raises
    ------
    DeterminismError
        If two repeats give different labels.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    report = RunReport(ds.name, INITKMIX, k, ds.provenance)
    for _ in range(repeats):
        t0 = time.perf_counter()
        outcome = run_initkmix(ds, model, k, max_iter, balance, square_weights)
        result = iterate(ds, model, outcome.labels, k, max_iter, square_weights)
        _record(report, ds, result, t0)
        report.consensus_method = outcome.method
        report.anmi_scores = outcome.anmi_scores
    first = report.labels[0]
    if any(not np.array_equal(first, lab) for lab in report.labels[1:]):
        raise DeterminismError(f"{ds.name}: repeated initKmix runs gave different partitions")
    if report.acs and accuracy_sd(report.acs) != 0.0:
        raise DeterminismError(f"{ds.name}: initKmix accuracy SD is {accuracy_sd(report.acs)}")
    return report


def per_attribute(
    ds: Dataset,
    model: DistanceModel,
    k: int,
    max_iter: int = 100,
    balance: float = 1.2,
    square_weights: bool = True,
) -> dict:
    """AC of every attribute-seeded run next to the final initKmix AC.

    A run ``qualifies`` when it is numeric or its seed has exactly ``k``
    clusters. Returns a dict with ``rows`` (one per run), ``final_ac``,
    ``initial_ac`` and ``skipped``.
    """
    runs, skipped, _ = attribute_runs(ds, model, k, max_iter, square_weights)
    outcome = run_initkmix(ds, model, k, max_iter, balance, square_weights)
    final = iterate(ds, model, outcome.labels, k, max_iter, square_weights)
    rows = []
    for r in runs:
        rows.append(
            {
                "attribute": r.attribute,
                "kind": r.kind,
                "n_clusters": r.n_clusters,
                "qualifies": r.kind != "categorical" or r.n_clusters == k,
                "ac": _ac(ds, r.labels),
                "n_iter": r.result.n_iter,
            }
        )
    return {
        "dataset": ds.name,
        "k": k,
        "rows": rows,
        "initial_ac": _ac(ds, outcome.labels),
        "final_ac": _ac(ds, final.labels),
        "consensus_method": outcome.method,
        "skipped": skipped,
    }


TABLE_FIELDS = (
    "dataset",
    "status",
    "initkmix_ac",
    "initkmix_sd",
    "random_mean",
    "random_sd",
    "consensus",
    "ref_initkmix_ac",
    "ref_random_mean",
    "ref_random_sd",
    "error",
)


def load_entry(entry: dict, base=None) -> Dataset:
    """Load a manifest entry: ``{"name"}`` for a registered dataset, or
    ``{"name", "data", "schema"}`` with paths relative to ``base``."""
    if "data" not in entry:
        return datasets.load(entry["name"])
    base = Path(base) if base is not None else Path.cwd()
    data, schema = base / entry["data"], base / entry["schema"]
    if not data.is_file():
        raise datasets.DatasetUnavailable(f"data file {data} not found")
    return load_csv(data, read_schema(schema), name=entry["name"])


def _reference_of(entry: dict) -> dict:
    if "reference" in entry:
        return entry["reference"]
    try:
        return datasets.reference(entry["name"])
    except KeyError:
        return {}


def experiment_row(
    entry,
    repeats: int = 50,
    seed: int = 0,
    init_repeats: int = 1,
    bins: int | None = None,
    max_iter: int = 100,
    balance: float = 1.2,
    base=None,
) -> dict:
    """One benchmark row; failures are reported in the row, not raised.

    ``entry`` is a registered dataset name or a manifest entry dict.
    """
    entry = {"name": entry} if isinstance(entry, str) else dict(entry)
    row = dict.fromkeys(TABLE_FIELDS)
    row["dataset"] = entry.get("name")
    try:
        ref = _reference_of(entry)
        row.update(
            ref_initkmix_ac=ref.get("initkmix_ac"),
            ref_random_mean=ref.get("random_mean"),
            ref_random_sd=ref.get("random_sd"),
        )
        raw = load_entry(entry, base)
        k = int(entry.get("k") or raw.schema.k or 2)
        ds, model = prepare(raw, k, bins=bins)
        ik = initkmix_runs(ds, model, k, init_repeats, max_iter, balance)
        rnd = random_runs(ds, model, k, repeats, seed, max_iter)
        row.update(
            status="ok",
            initkmix_ac=ik.mean_ac,
            initkmix_sd=ik.sd,
            random_mean=rnd.mean_ac,
            random_sd=rnd.sd,
            consensus=ik.consensus_method,
        )
    except datasets.DatasetUnavailable as exc:
        row.update(status="unavailable", error=str(exc))
    except Exception as exc:  # one bad dataset must not stop the table
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
    return row


def run_experiment(entries, **options) -> list[dict]:
    """Rows in manifest order."""
    return [experiment_row(e, **options) for e in entries]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=TABLE_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()


def format_table(rows) -> str:
    """Plain-text table: our results next to the reference values."""

    def f(v):
        return "-" if v is None else f"{v:.3f}"

    head = f"{'dataset':<22}{'initKmix':>10}{'SD':>8}{'random':>9}{'SD':>8}   {'reference':<22}{'consensus':<10}"
    lines = [head, "-" * len(head)]
    for r in rows:
        ref = f"{f(r['ref_initkmix_ac'])} | {f(r['ref_random_mean'])} {f(r['ref_random_sd'])}"
        if r["status"] != "ok":
            lines.append(f"{r['dataset']:<22}{r['status']:>10}{'':>25}   {ref:<22}")
            continue
        lines.append(
            f"{r['dataset']:<22}{f(r['initkmix_ac']):>10}{f(r['initkmix_sd']):>8}"
            f"{f(r['random_mean']):>9}{f(r['random_sd']):>8}   {ref:<22}{r['consensus'] or '-':<10}"
        )
    return "\n".join(lines) + "\n"
