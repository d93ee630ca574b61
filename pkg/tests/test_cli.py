import json

import numpy as np
import pytest
from click.testing import CliRunner

from mvdiff.cli import load_dataset, main, run_experiment
from mvdiff.exceptions import (
    MalformedNumber,
    MissingK,
    NoViewsFound,
    RowCountMismatch,
)


def write_dataset(path, views, labels=None):
    path.mkdir(parents=True, exist_ok=True)
    for i, X in enumerate(views):
        np.savetxt(path / f"view_{i}.csv", X, delimiter=",", newline="\n")
    if labels is not None:
        np.savetxt(path / "labels.csv", np.asarray(labels)[:, None], fmt="%d", newline="\n")


@pytest.fixture
def blob_dir(tmp_path):
    from mvdiff.synthetic import make_multiview_blobs
    views, labels = make_multiview_blobs(n=30, k=3, seed=9)
    d = tmp_path / "blobs"
    write_dataset(d, views, labels)
    return d


class TestLoadDataset:
    def test_loads_views_in_index_order(self, tmp_path, rng):
        d = tmp_path / "ds"
        views = [rng.normal(size=(4, 2)), rng.normal(size=(4, 3))]
        write_dataset(d, views)
        ds = load_dataset(d)
        assert ds.n_views == 2
        assert ds.n_samples == 4
        assert ds.labels is None
        assert np.allclose(ds.views[1], views[1])

    def test_labels_attached(self, tmp_path, rng):
        d = tmp_path / "ds"
        write_dataset(d, [rng.normal(size=(4, 2))], labels=[0, 1, 0, 1])
        ds = load_dataset(d)
        assert ds.labels.tolist() == [0, 1, 0, 1]

    def test_row_count_mismatch_names_file(self, tmp_path, rng):
        d = tmp_path / "ds"
        write_dataset(d, [rng.normal(size=(4, 2)), rng.normal(size=(5, 2))])
        with pytest.raises(RowCountMismatch, match="view_1.csv"):
            load_dataset(d)

    def test_malformed_number_located(self, tmp_path):
        d = tmp_path / "ds"
        d.mkdir()
        (d / "view_0.csv").write_text("1.0,2.0\n1.0,oops\n")
        with pytest.raises(MalformedNumber, match="line 2, column 2"):
            load_dataset(d)

    def test_no_views_found(self, tmp_path):
        d = tmp_path / "empty"
        d.mkdir()
        with pytest.raises(NoViewsFound):
            load_dataset(d)


class TestRunExperiment:
    PARAMS = {"max_epochs": 20, "random_state": 42}

    def test_report_schema_both_backends(self, blob_dir):
        ds = load_dataset(blob_dir)
        report, est = run_experiment(ds, dict(self.PARAMS), ["km", "sc"])
        assert set(report["backends"]) == {"km", "sc"}
        for block in report["backends"].values():
            assert set(block["metrics"]) == {"nmi", "acc", "ari", "f1", "precision", "purity"}
            assert len(block["labels"]) == 30
        assert report["epochs_run"] == 20
        assert report["config"]["n_clusters"] == 3

    def test_single_backend(self, blob_dir):
        ds = load_dataset(blob_dir)
        report, _ = run_experiment(ds, dict(self.PARAMS), ["km"])
        assert list(report["backends"]) == ["km"]

    def test_missing_k_without_labels(self, tmp_path, rng):
        d = tmp_path / "ds"
        write_dataset(d, [rng.normal(size=(6, 2))])
        with pytest.raises(MissingK):
            run_experiment(load_dataset(d), dict(self.PARAMS), ["km"])

    def test_unlabeled_with_explicit_k(self, tmp_path, rng):
        d = tmp_path / "ds"
        write_dataset(d, [rng.normal(size=(6, 2))])
        report, _ = run_experiment(load_dataset(d), dict(self.PARAMS), ["km"], k=2)
        assert report["backends"]["km"]["metrics"] is None
        assert len(report["backends"]["km"]["labels"]) == 6


class TestCommandLine:
    def test_run_writes_identical_reports(self, blob_dir, tmp_path):
        runner = CliRunner()
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            result = runner.invoke(main, [
                "run", "--data", str(blob_dir), "--out", str(out), "--max-epochs", "20",
            ])
            assert result.exit_code == 0, result.output
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_run_reports_error_category(self, tmp_path):
        d = tmp_path / "empty"
        d.mkdir()
        result = CliRunner().invoke(main, ["run", "--data", str(d)])
        assert result.exit_code == 2
        text = result.output
        try:
            text += result.stderr
        except ValueError:
            pass  # stderr mixed into output on older click
        assert "NoViewsFound" in text

    def test_generate_then_run(self, tmp_path):
        runner = CliRunner()
        data = tmp_path / "gen"
        result = runner.invoke(main, [
            "generate-synthetic", "--out", str(data), "--n", "30", "--k", "3", "--seed", "5",
        ])
        assert result.exit_code == 0, result.output
        assert (data / "view_0.csv").exists()
        assert (data / "labels.csv").exists()
        out = tmp_path / "r.json"
        result = runner.invoke(main, [
            "run", "--data", str(data), "--out", str(out),
            "--max-epochs", "50", "--backend", "sc",
        ])
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        assert list(report["backends"]) == ["sc"]

    def test_save_graph_round_trips(self, blob_dir, tmp_path):
        runner = CliRunner()
        graph_file = tmp_path / "H.csv"
        result = runner.invoke(main, [
            "run", "--data", str(blob_dir), "--max-epochs", "10",
            "--save-graph", str(graph_file), "--out", str(tmp_path / "r.json"),
        ])
        assert result.exit_code == 0, result.output
        H = np.loadtxt(graph_file, delimiter=",")
        assert H.shape == (30, 30)
        assert np.abs(H - H.T).max() <= 1e-10
