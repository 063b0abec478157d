"""Command-line interface.

Exit codes: 0 success, 2 bad parameters, 3 I/O failure, 4 schema error,
5 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, consensus, datasets, experiment
from .codist import ModelError
from .dataset import DataError, SchemaError, load_csv, read_schema
from .initkmix import InitError, run_initkmix
from .kmcmd import iterate
from .metrics import accuracy

OUT_DIR_ENV = "INITKMIX_OUT_DIR"
DEFAULT_OUT_DIR = "initkmix-out"

EXIT_OK, EXIT_PARAM, EXIT_IO, EXIT_SCHEMA, EXIT_DATA = 0, 2, 3, 4, 5

log = logging.getLogger("initkmix")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---- helpers ---------------------------------------------------------------


def _load(args):
    """Dataset from a path plus ``--schema``, or a registered dataset name."""
    path = Path(args.data)
    if args.schema is None:
        if not path.exists() and args.data in datasets.names():
            return datasets.load(args.data)
        raise CliError("--schema is required for a data file", EXIT_SCHEMA)
    schema = read_schema(args.schema)
    return load_csv(path, schema)


def _k(args, ds) -> int:
    k = args.k if args.k is not None else ds.schema.k
    if k is None:
        raise CliError("no cluster count: pass --k or set @k in the schema", EXIT_PARAM)
    if k < 2:
        raise CliError(f"--k must be >= 2, got {k}", EXIT_PARAM)
    if k > ds.n_samples:
        raise CliError(f"--k={k} exceeds the number of rows ({ds.n_samples})", EXIT_PARAM)
    return k


def _out_dir(args) -> Path:
    out = Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_labels(path: Path, labels) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.writelines(f"{int(v)}\n" for v in labels)


def read_labels(path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip()]


def read_label_matrix(path) -> np.ndarray:
    """CSV with one column per run; a non-integer first row is a header."""
    with open(path, newline="", encoding="utf-8") as f:
        rows = [r for r in csv.reader(f) if r and any(c.strip() for c in r)]
    if rows and not all(c.strip().lstrip("-").isdigit() for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise CliError(f"{path}: empty label matrix", EXIT_DATA)
    width = len(rows[0])
    for i, r in enumerate(rows, 1):
        if len(r) != width:
            raise CliError(f"{path}: row {i} has {len(r)} fields, expected {width}", EXIT_DATA)
    try:
        return np.array([[int(c) for c in r] for r in rows], dtype=np.int64)
    except ValueError as exc:
        raise CliError(f"{path}: labels must be integers ({exc})", EXIT_DATA) from None


def _dump(obj, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, default=_json_default)
        f.write("\n")


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, default=_json_default))


def _summary(report: experiment.RunReport) -> dict:
    d = report.to_dict()
    d.pop("provenance")
    return d


# ---- commands --------------------------------------------------------------


def cmd_cluster(args) -> int:
    ds = _load(args)
    k = _k(args, ds)
    ds, model = experiment.prepare(ds, k, bins=args.bins)
    if args.method == experiment.RANDOM:
        repeats = 50 if args.repeats is None else args.repeats
        report = experiment.random_runs(ds, model, k, repeats, args.seed, args.max_iter)
    else:
        repeats = 1 if args.repeats is None else args.repeats
        report = experiment.initkmix_runs(ds, model, k, repeats, args.max_iter, args.balance)
    out = _out_dir(args)
    for r, labels in enumerate(report.labels):
        write_labels(out / f"labels_{report.method}_{r:03d}.txt", labels)
    _dump(report.to_dict(), out / f"report_{report.method}.json")
    if args.dump_model:
        _dump(model.to_dict(ds), out / "model.json")
    _print_json(_summary(report))
    return EXIT_OK


def cmd_init(args) -> int:
    ds = _load(args)
    k = _k(args, ds)
    ds, model = experiment.prepare(ds, k, bins=args.bins)
    outcome = run_initkmix(ds, model, k, args.max_iter, args.balance)
    out = _out_dir(args)
    write_labels(out / "initial_labels.txt", outcome.labels)
    with open(out / "attribute_runs.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([r.attribute for r in outcome.runs])
        w.writerows(outcome.label_matrix.tolist())
    info = {
        "dataset": ds.name,
        "k": k,
        "consensus_method": outcome.method,
        "anmi_scores": outcome.anmi_scores,
        "runs": [
            {"attribute": r.attribute, "kind": r.kind, "n_clusters": r.n_clusters,
             "n_iter": r.result.n_iter, "converged": r.result.converged}
            for r in outcome.runs
        ],
        "skipped": outcome.skipped,
        "flagged": outcome.flagged,
    }
    if ds.target is not None:
        info["initial_ac"] = accuracy(outcome.labels, ds.target)[0]
    _dump(info, out / "init.json")
    if args.dump_model:
        _dump(model.to_dict(ds), out / "model.json")
    _print_json(info)
    return EXIT_OK


def cmd_combine(args) -> int:
    lm = read_label_matrix(args.labels)
    if args.k < 1:
        raise CliError("--k must be >= 1", EXIT_PARAM)
    if args.k > lm.shape[0]:
        raise CliError(f"--k={args.k} exceeds the number of rows ({lm.shape[0]})", EXIT_PARAM)
    res = consensus.combine(lm, args.k, args.balance)
    if args.out:
        write_labels(Path(args.out), res.labels)
    else:
        sys.stdout.writelines(f"{int(v)}\n" for v in res.labels)
    print(json.dumps({"method": res.method, "anmi_scores": res.scores}), file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    labels = read_labels(args.labels)
    truth = read_labels(args.truth)
    if len(labels) != len(truth):
        raise CliError(f"{len(labels)} labels but {len(truth)} truth values", EXIT_DATA)
    if not labels:
        raise CliError("no labels to evaluate", EXIT_DATA)
    ac, mapping = accuracy(np.array(labels), np.array(truth))
    _print_json({"ac": ac, "n": len(labels), "mapping": mapping})
    return EXIT_OK


def cmd_per_attribute(args) -> int:
    ds = _load(args)
    if ds.target is None:
        raise CliError("per-attribute accuracy needs a label column in the schema", EXIT_SCHEMA)
    k = _k(args, ds)
    ds, model = experiment.prepare(ds, k, bins=args.bins)
    rep = experiment.per_attribute(ds, model, k, args.max_iter, args.balance)
    out = _out_dir(args)
    fields = ["attribute", "kind", "n_clusters", "qualifies", "ac", "n_iter", "final_ac"]
    for fname, rows in (
        ("per_attribute_all.csv", rep["rows"]),
        ("per_attribute.csv", [r for r in rep["rows"] if r["qualifies"]]),
    ):
        with open(out / fname, "w", newline="", encoding="utf-8") as f:
            w = csv.DictWriter(f, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({**r, "final_ac": rep["final_ac"]})
    _dump(rep, out / "per_attribute.json")
    _print_json(rep)
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.manifest is None:
        entries, base = datasets.manifest(), datasets.DATA_DIR
    else:
        path = Path(args.manifest)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CliError(f"{path}: invalid manifest JSON: {exc}", EXIT_SCHEMA) from None
        entries = doc.get("datasets", []) if isinstance(doc, dict) else doc
        base = path.parent
    if args.only:
        wanted = set(args.only)
        entries = [e for e in entries if (e if isinstance(e, str) else e.get("name")) in wanted]
    rows = experiment.run_experiment(
        entries,
        repeats=50 if args.repeats is None else args.repeats,
        seed=args.seed,
        init_repeats=args.init_repeats,
        bins=args.bins,
        max_iter=args.max_iter,
        balance=args.balance,
        base=base,
    )
    out = _out_dir(args)
    (out / "experiment.csv").write_text(experiment.rows_to_csv(rows), encoding="utf-8")
    table = experiment.format_table(rows)
    (out / "experiment.txt").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    return EXIT_OK


# ---- parser ----------------------------------------------------------------


def _common(p, data=True):
    if data:
        p.add_argument("data", help="data file, or the name of a registered dataset")
        p.add_argument("--schema", help="schema manifest for the data file")
        p.add_argument("--k", type=int, help="number of clusters (default: the schema's @k)")
    p.add_argument("--bins", type=int, help="equal-width bins for numeric attributes (default max(k, 4))")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--balance", type=float, default=1.2, help="consensus part-size slack")
    p.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or ./{DEFAULT_OUT_DIR})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="initkmix", description="Deterministic clustering of mixed data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a dataset and write label files")
    _common(p)
    p.add_argument("--method", choices=[experiment.INITKMIX, experiment.RANDOM], default=experiment.INITKMIX)
    p.add_argument("--seed", type=int, default=0, help="random baseline seed (ignored by initkmix)")
    p.add_argument("--repeats", type=int, help="runs (default 50 for random, 1 for initkmix)")
    p.add_argument("--dump-model", action="store_true", help="also write value distances and weights")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("init", help="build the initial partition and show the attribute runs")
    _common(p)
    p.add_argument("--dump-model", action="store_true")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("combine", help="consensus of a label matrix CSV (one column per run)")
    p.add_argument("labels")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--balance", type=float, default=1.2)
    p.add_argument("--out", help="label file to write (default: stdout)")
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("eval", help="accuracy of a label file against a truth file")
    p.add_argument("labels")
    p.add_argument("truth")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("per-attribute", help="accuracy of every attribute-seeded run")
    _common(p)
    p.set_defaults(func=cmd_per_attribute)

    p = sub.add_parser("experiment", help="benchmark table: initKmix vs random starts")
    p.add_argument("manifest", nargs="?", help="manifest JSON (default: the bundled registry)")
    _common(p, data=False)
    p.add_argument("--only", nargs="+", metavar="NAME", help="restrict to these datasets")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, help="random-start runs per dataset (default 50)")
    p.add_argument("--init-repeats", type=int, default=1, help="initKmix runs per dataset (checked identical)")
    p.set_defaults(func=cmd_experiment)
    return parser


def _positive(args) -> None:
    for name in ("repeats", "max_iter", "init_repeats"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            raise CliError(f"--{name.replace('_', '-')} must be >= 1", EXIT_PARAM)
    bins = getattr(args, "bins", None)
    if bins is not None and bins < 2:
        raise CliError("--bins must be >= 2", EXIT_PARAM)
    balance = getattr(args, "balance", None)
    if balance is not None and balance < 1.0:
        raise CliError("--balance must be >= 1", EXIT_PARAM)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        _positive(args)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (DataError, ModelError, InitError, UnicodeDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
