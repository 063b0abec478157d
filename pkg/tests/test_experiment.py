import numpy as np
import pytest

from initkmix import experiment
from initkmix.dataset import normalize

from _helpers import mixed_blobs, prepared


def test_random_runs_use_independent_child_streams():
    ds, m = prepared("heart_cleveland")
    a = experiment.random_runs(ds, m, 2, repeats=5, seed=3)
    b = experiment.random_runs(ds, m, 2, repeats=2, seed=3)
    for x, y in zip(a.labels, b.labels):
        np.testing.assert_array_equal(x, y)
    assert len(a.acs) == 5 and a.sd >= 0 and a.seed == 3
    d = a.to_dict()
    assert d["mean_ac"] == pytest.approx(np.mean(a.acs)) and "normalization" in d["provenance"]


def test_initkmix_runs_have_zero_sd():
    ds, m = prepared("vote")
    r = experiment.initkmix_runs(ds, m, 2, repeats=3)
    assert r.sd == 0.0 and r.consensus_method in ("HGPA", "MCLA")


def test_per_attribute_report():
    ds, m = prepared("heart_cleveland")
    rep = experiment.per_attribute(ds, m, 2)
    assert len(rep["rows"]) == 13
    for row in rep["rows"]:
        assert row["qualifies"] == (row["kind"] == "numeric" or row["n_clusters"] == 2)
        assert 0 < row["ac"] <= 1


def test_unlabelled_data_reports_no_accuracy():
    raw = mixed_blobs(40)
    from dataclasses import replace

    ds = normalize(replace(raw, target=None, class_names=None))
    ds, m = experiment.prepare(ds, 2)
    r = experiment.random_runs(ds, m, 2, repeats=2)
    assert r.acs == [] and r.mean_ac is None


def test_rows_and_table_formatting():
    rows = experiment.run_experiment([{"name": "ghost", "data": "x.csv", "schema": "x.schema"}], repeats=2)
    assert rows[0]["status"] == "unavailable"
    bad = experiment.run_experiment(["not-registered"], repeats=2)
    assert bad[0]["status"] == "error"
    text = experiment.format_table(rows + bad)
    assert "ghost" in text and "unavailable" in text
    assert experiment.rows_to_csv([]).strip() == ",".join(experiment.TABLE_FIELDS)
