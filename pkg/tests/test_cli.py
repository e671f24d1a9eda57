import json

from aqoci.cli import main
from aqoci.data import load_csv


def test_generate_and_reload(tmp_path, capsys):
    out = tmp_path / "blobs.csv"
    labels = tmp_path / "labels.txt"
    code = main([
        "generate", "--out", str(out), "--n", "30", "--k", "3", "--seed", "2",
        "--labels-out", str(labels),
    ])
    assert code == 0
    ds = load_csv(str(out))
    assert ds.points.shape == (2, 30)
    assert len(labels.read_text().splitlines()) == 30


def test_solve_oracle_prints_centroids(capsys):
    code = main([
        "solve", "--blobs", "4", "--k", "2", "--bits", "1",
        "--iterations", "3", "--sampler", "oracle",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "centroids" in out
    assert "one-hot valid" in out


def test_solve_trace_output(tmp_path, capsys):
    trace = tmp_path / "trace.json"
    code = main([
        "solve", "--blobs", "6", "--k", "2", "--bits", "2", "--iterations", "2",
        "--sampler", "sa", "--sa-reads", "2", "--sa-sweeps", "40",
        "--trace-out", str(trace),
    ])
    assert code == 0
    payload = json.loads(trace.read_text())
    assert payload["iterations"] == 2
    assert len(payload["per_iteration"]) == 2


def test_bench_writes_outputs(tmp_path, capsys):
    out_dir = tmp_path / "out"
    code = main([
        "bench", "--blobs", "12", "--k", "2", "--sizes", "6", "12",
        "--methods", "random", "--out-dir", str(out_dir),
    ])
    assert code == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert {row["method"] for row in report["rows"]} == {"random"}
    assert (out_dir / "metrics.csv").exists()


def test_bench_config_file_with_flag_precedence(tmp_path, capsys):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({
        "dataset": "blobs",
        "dataset_size": 12,
        "sample_sizes": [6, 12],
        "methods": ["random"],
        "k": 2,
        "seed": 5,
        "output_dir": str(tmp_path / "ignored"),
    }))
    out_dir = tmp_path / "real"
    code = main([
        "bench", "--config", str(config_path), "--seed", "9",
        "--out-dir", str(out_dir),
    ])
    assert code == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["config"]["seed"] == 9  # flag beats config file
    assert report["config"]["dataset_size"] == 12  # file value kept


def test_bench_rejects_bad_config(tmp_path, capsys):
    code = main([
        "bench", "--blobs", "10", "--sizes", "10", "5", "--methods", "random",
        "--out-dir", str(tmp_path),
    ])
    assert code == 2


def test_solve_remote_without_endpoint_is_config_error(capsys):
    code = main(["solve", "--blobs", "6", "--k", "2", "--sampler", "remote"])
    assert code == 2


def test_report_reemits(tmp_path, capsys):
    out_dir = tmp_path / "first"
    assert main([
        "bench", "--blobs", "8", "--k", "2", "--sizes", "8",
        "--methods", "random", "--out-dir", str(out_dir),
    ]) == 0
    second = tmp_path / "second"
    assert main([
        "report", "--report", str(out_dir / "report.json"), "--out-dir", str(second),
    ]) == 0
    assert (second / "report.json").read_text() == (out_dir / "report.json").read_text()


def test_report_missing_file_is_io_error(tmp_path, capsys):
    code = main(["report", "--report", str(tmp_path / "nope.json"), "--out-dir", str(tmp_path)])
    assert code == 4


def test_solve_remote_with_env_token(tmp_path, capsys, monkeypatch):
    # an echo-zeros stub: valid energy is the posted problem's constant
    import threading
    from http.server import BaseHTTPRequestHandler, HTTPServer

    seen_tokens = []

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            body = json.loads(self.rfile.read(length))
            seen_tokens.append(self.headers.get("Authorization"))
            payload = json.dumps({
                "records": [{
                    "bits": "0" * body["num_vars"],
                    "energy": body["constant"],
                    "occurrences": 1,
                }]
            }).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        endpoint = f"http://127.0.0.1:{server.server_address[1]}"
        monkeypatch.setenv("AQOCI_SOLVER_TOKEN", "env-secret")
        code = main([
            "solve", "--blobs", "4", "--k", "2", "--bits", "1", "--iterations", "2",
            "--sampler", "remote", "--remote-endpoint", endpoint,
        ])
        assert code == 0
        assert seen_tokens and all(t == "Bearer env-secret" for t in seen_tokens)
        out = capsys.readouterr().out
        assert "centroids" in out
    finally:
        server.shutdown()


def test_bench_flag_equal_to_default_still_overrides_config(tmp_path, capsys):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({
        "dataset_size": 12,
        "sample_sizes": [6, 12],
        "methods": ["random"],
        "k": 2,
        "seed": 5,
    }))
    out_dir = tmp_path / "out"
    # --seed 0 equals the documented default but must still beat the file
    code = main([
        "bench", "--config", str(config_path), "--seed", "0",
        "--out-dir", str(out_dir),
    ])
    assert code == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["config"]["seed"] == 0
