import json

import pytest

from aqoci.bench import (
    ExperimentConfig,
    config_from_dict,
    config_hash,
    config_to_dict,
    emit_outputs,
    report_from_dict,
    report_to_dict,
    run_experiment,
    strip_timing,
)
from aqoci.errors import ConfigurationError
from aqoci.kmeans import inertia_of

TOY = ExperimentConfig(
    sample_sizes=(8, 16),
    methods=("random", "sa"),
    dataset_size=16,
    iterations=2,
    sa_reads=4,
    sa_sweeps=60,
)


class TestConfig:
    def test_sizes_must_ascend(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(sample_sizes=(100, 50))

    def test_unknown_method(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(methods=("random", "genetic"))

    def test_remote_needs_endpoint_or_fallback(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(methods=("remote",))
        ExperimentConfig(methods=("remote",), remote_fallback=True)

    def test_hash_stable_under_key_reordering(self):
        payload = config_to_dict(TOY)
        reordered = dict(reversed(list(payload.items())))
        assert config_hash(config_from_dict(reordered)) == config_hash(TOY)

    def test_round_trip(self):
        assert config_from_dict(config_to_dict(TOY)) == TOY

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigurationError):
            config_from_dict({"sample_szies": [10]})


class TestRunExperiment:
    def test_single_cell_report(self):
        config = ExperimentConfig(
            sample_sizes=(4,), methods=("random",), dataset_size=4, k=2
        )
        report = run_experiment(config)
        assert len(report.rows) == 1
        row = report.rows[0]
        assert row.method == "random" and row.sample_size == 4
        assert row.metrics.inertia >= 0.0
        assert row.metrics.n_iter >= 1

    def test_inertia_recomputable_from_rerun(self):
        from aqoci.data import make_blobs
        from aqoci.kmeans import KMeansConfig, lloyd, random_init

        config = ExperimentConfig(sample_sizes=(10,), methods=("random",), dataset_size=10)
        report = run_experiment(config)
        ds = make_blobs(10, 3, 0)
        run = lloyd(ds.points, KMeansConfig(k=3, init=random_init(ds.points, 3, 0)))
        assert report.rows[0].metrics.inertia == pytest.approx(
            inertia_of(ds.points, run.labels, run.final_centroids), abs=1e-12
        )

    def test_rows_sorted_and_complete(self):
        report = run_experiment(TOY)
        keys = [(r.method, r.sample_size) for r in report.rows]
        assert keys == sorted(keys)
        assert len(keys) == 4

    def test_determinism_modulo_timing(self):
        a = strip_timing(report_to_dict(run_experiment(TOY)))
        b = strip_timing(report_to_dict(run_experiment(TOY)))
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


class TestOutputs:
    def test_files_and_csv_shape(self, tmp_path):
        config = ExperimentConfig(
            sample_sizes=(4,), methods=("random",), dataset_size=4, k=2,
            output_dir=str(tmp_path),
        )
        report = run_experiment(config)
        written = emit_outputs(report, tmp_path)
        names = {p.name for p in written}
        assert "report.json" in names and "metrics.csv" in names
        csv_lines = (tmp_path / "metrics.csv").read_text().strip().splitlines()
        assert csv_lines[0] == "method,size,metric,value"
        assert len(csv_lines) == 1 + 6  # one row per metric

    def test_csv_round_trip_exact(self, tmp_path):
        report = run_experiment(TOY)
        emit_outputs(report, tmp_path)
        rows = {}
        for line in (tmp_path / "metrics.csv").read_text().strip().splitlines()[1:]:
            method, size, metric, value = line.split(",")
            rows[(method, int(size), metric)] = value
        for row in report.rows:
            for name in ("inertia", "silhouette", "homogeneity", "completeness", "v_measure"):
                stored = rows[(row.method, row.sample_size, name)]
                assert float(stored) == getattr(row.metrics, name)
            assert int(rows[(row.method, row.sample_size, "n_iter")]) == row.metrics.n_iter

    def test_svg_polylines(self, tmp_path):
        report = run_experiment(TOY)
        emit_outputs(report, tmp_path)
        svg = (tmp_path / "metric_inertia.svg").read_text()
        assert svg.count("<polyline") == 2  # one per method
        first = svg.split("<polyline")[1]
        points_attr = first.split('points="')[1].split('"')[0]
        assert len(points_attr.split()) == 2  # two sweep sizes

    def test_report_json_round_trip(self, tmp_path):
        report = run_experiment(TOY)
        emit_outputs(report, tmp_path)
        payload = json.loads((tmp_path / "report.json").read_text())
        again = report_from_dict(payload)
        assert report_to_dict(again) == payload


class TestStoredRuns:
    def test_metrics_rederive_from_stored_cluster_runs(self, tmp_path):
        import numpy as np

        from aqoci.data import make_blobs
        from aqoci.metrics import homogeneity_completeness_v, silhouette

        report = run_experiment(TOY)
        emit_outputs(report, tmp_path)
        dataset = make_blobs(TOY.dataset_size, TOY.k, TOY.seed, TOY.blob_std)
        for row in report.rows:
            path = tmp_path / "runs" / f"{row.method}_{row.sample_size}.json"
            stored = json.loads(path.read_text())
            data = dataset.points[:, : row.sample_size]
            labels = np.array(stored["labels"])
            centroids = np.array(stored["final_centroids"])
            assert row.metrics.inertia == pytest.approx(
                inertia_of(data, labels, centroids), abs=1e-9
            )
            assert row.metrics.silhouette == pytest.approx(
                silhouette(data, labels), abs=1e-12
            )
            h, c, v = homogeneity_completeness_v(
                dataset.true_labels[: row.sample_size], labels
            )
            assert (row.metrics.homogeneity, row.metrics.completeness, row.metrics.v_measure) == (
                pytest.approx(h), pytest.approx(c), pytest.approx(v)
            )
            assert row.metrics.n_iter == stored["n_iter"]
            assert stored["inertia"] == row.metrics.inertia
