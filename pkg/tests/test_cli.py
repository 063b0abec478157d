import json

import numpy as np
import pytest

from initkmix import cli, datasets

DATA = datasets.DATA_DIR


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_initkmix_repeats_write_identical_files(tmp_path, capsys):
    code, out, _ = run(capsys, "cluster", DATA / "vote.csv", "--schema", DATA / "vote.schema",
                       "--repeats", 5, "--out-dir", tmp_path)
    assert code == 0
    files = sorted(tmp_path.glob("labels_initkmix_*.txt"))
    assert len(files) == 5
    assert len({f.read_bytes() for f in files}) == 1
    assert json.loads(out)["sd"] == 0.0
    lines = files[0].read_text().splitlines()
    assert len(lines) == 435 and set(lines) <= {"0", "1"}


def test_initkmix_ignores_seed(tmp_path, capsys):
    for seed in (1, 2):
        run(capsys, "cluster", "heart_cleveland", "--seed", seed, "--out-dir", tmp_path / str(seed))
    assert (tmp_path / "1" / "labels_initkmix_000.txt").read_bytes() == (tmp_path / "2" / "labels_initkmix_000.txt").read_bytes()


def test_random_baseline_reproducible(tmp_path, capsys):
    outs = []
    for d in ("a", "b"):
        code, out, _ = run(capsys, "cluster", "vote", "--method", "random", "--seed", 7, "--repeats", 4,
                           "--out-dir", tmp_path / d)
        assert code == 0
        outs.append(json.loads(out)["acs"])
    assert outs[0] == outs[1] and len(outs[0]) == 4
    assert (tmp_path / "a" / "labels_random_003.txt").read_bytes() == (tmp_path / "b" / "labels_random_003.txt").read_bytes()


def test_out_dir_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path / "env"))
    assert run(capsys, "cluster", "vote")[0] == 0
    assert (tmp_path / "env" / "labels_initkmix_000.txt").exists()


def test_init_combine_eval_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "init", "australian", "--dump-model", "--out-dir", tmp_path)
    assert code == 0
    info = json.loads(out)
    assert len(info["runs"]) == 14
    model = json.loads((tmp_path / "model.json").read_text())
    assert len(model["numeric"]) == 6 and len(model["categorical"]) == 8
    code, _, err = run(capsys, "combine", tmp_path / "attribute_runs.csv", "--k", 2, "--out", tmp_path / "c.txt")
    assert code == 0 and json.loads(err)["method"] == info["consensus_method"]
    assert (tmp_path / "c.txt").read_text() == (tmp_path / "initial_labels.txt").read_text()
    truth = datasets.load("australian")
    (tmp_path / "truth.txt").write_text("\n".join(truth.class_names[t] for t in truth.target) + "\n")
    code, out, _ = run(capsys, "eval", tmp_path / "c.txt", tmp_path / "truth.txt")
    assert code == 0 and json.loads(out)["ac"] == pytest.approx(info["initial_ac"])


def test_combine_to_stdout(tmp_path, capsys):
    (tmp_path / "lm.csv").write_text("r1,r2\n0,1\n0,1\n1,0\n1,0\n")
    code, out, _ = run(capsys, "combine", tmp_path / "lm.csv", "--k", 2)
    assert code == 0
    labels = out.split()
    assert labels[0] == labels[1] != labels[2] == labels[3]


def test_per_attribute_views(tmp_path, capsys):
    code, out, _ = run(capsys, "per-attribute", "heart_cleveland", "--out-dir", tmp_path)
    assert code == 0
    all_rows = (tmp_path / "per_attribute_all.csv").read_text().splitlines()
    kept = (tmp_path / "per_attribute.csv").read_text().splitlines()
    assert len(all_rows) == 14 and 1 < len(kept) < len(all_rows)


def test_experiment_manifest(tmp_path, capsys):
    (tmp_path / "empty.json").write_text('{"datasets": []}')
    code, out, _ = run(capsys, "experiment", tmp_path / "empty.json", "--out-dir", tmp_path)
    assert code == 0 and len(out.splitlines()) == 2
    (tmp_path / "m.json").write_text(json.dumps({"datasets": [
        {"name": "missing", "data": "nope.csv", "schema": "nope.schema"},
        {"name": "vote"},
    ]}))
    code, out, _ = run(capsys, "experiment", tmp_path / "m.json", "--repeats", 3, "--out-dir", tmp_path)
    assert code == 0
    csv_rows = (tmp_path / "experiment.csv").read_text().splitlines()
    assert csv_rows[1].startswith("missing,unavailable") and csv_rows[2].startswith("vote,ok")


@pytest.mark.parametrize(
    "argv, code",
    [
        (["cluster", "nope.csv", "--schema", DATA / "vote.schema"], cli.EXIT_IO),
        (["cluster", DATA / "vote.csv"], cli.EXIT_SCHEMA),
        (["cluster", DATA / "vote.csv", "--schema", DATA / "australian.schema"], cli.EXIT_SCHEMA),
        (["cluster", "vote", "--k", 1], cli.EXIT_PARAM),
        (["cluster", "vote", "--k", 10000], cli.EXIT_PARAM),
        (["cluster", "vote", "--repeats", 0], cli.EXIT_PARAM),
        (["cluster", "vote", "--bins", 1], cli.EXIT_PARAM),
        (["cluster", "vote", "--balance", 0.5], cli.EXIT_PARAM),
    ],
)
def test_exit_codes(argv, code, capsys, tmp_path):
    assert cli.main([str(a) for a in argv] + ["--out-dir", str(tmp_path)]) == code


def test_bad_data_and_label_files(tmp_path, capsys):
    (tmp_path / "bad.csv").write_text("A,B\n1,x\n2\n")
    (tmp_path / "s.schema").write_text("A: numeric\nB: categorical\n")
    assert cli.main(["cluster", str(tmp_path / "bad.csv"), "--schema", str(tmp_path / "s.schema"),
                     "--k", "2", "--out-dir", str(tmp_path)]) == cli.EXIT_DATA
    (tmp_path / "lm.csv").write_text("0,1\n1\n")
    assert cli.main(["combine", str(tmp_path / "lm.csv"), "--k", "2"]) == cli.EXIT_DATA
    (tmp_path / "a.txt").write_text("0\n1\n")
    (tmp_path / "b.txt").write_text("0\n")
    assert cli.main(["eval", str(tmp_path / "a.txt"), str(tmp_path / "b.txt")]) == cli.EXIT_DATA
    with pytest.raises(SystemExit) as exc:
        cli.main(["cluster", "vote", "--method", "other"])
    assert exc.value.code == cli.EXIT_PARAM


def test_label_matrix_reader(tmp_path):
    (tmp_path / "m.csv").write_text("3,4\n5,4\n")
    np.testing.assert_array_equal(cli.read_label_matrix(tmp_path / "m.csv"), [[3, 4], [5, 4]])
