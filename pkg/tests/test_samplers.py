import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from aqoci.errors import EnergyMismatchError, SolverError
from aqoci.qubo import QuboProblem, brute_force_minimum, energy
from aqoci.rng import Pcg32
from aqoci.samplers import (
    AnnealConfig,
    RemoteSolverConfig,
    TabuConfig,
    make_sample_set,
    remote_hybrid,
    sample_set_to_json,
    simulated_annealing,
    tabu_search,
)


def random_problem(rng: Pcg32, n: int) -> QuboProblem:
    linear = {i: rng.uniform_range(-1, 1) for i in range(n)}
    quadratic = {
        (i, j): rng.uniform_range(-1, 1) for i in range(n) for j in range(i + 1, n)
    }
    return QuboProblem(n, linear, quadratic)


ONE_VAR = QuboProblem(1, {0: -1.0})
TWO_VAR = QuboProblem(2, {0: 1, 1: 1}, {(0, 1): -3})


class TestSimulatedAnnealing:
    def test_one_variable_downhill(self):
        result = simulated_annealing(ONE_VAR, AnnealConfig(num_reads=2, sweeps=10, seed=3))
        assert list(result.best().bits) == [1]
        assert result.best().energy == -1.0

    def test_determinism(self):
        rng = Pcg32(1)
        p = random_problem(rng, 10)
        cfg = AnnealConfig(num_reads=8, sweeps=100, seed=42)
        a = sample_set_to_json(simulated_annealing(p, cfg))
        b = sample_set_to_json(simulated_annealing(p, cfg))
        assert a == b

    def test_oracle_recovery_rate(self):
        rng = Pcg32(7)
        hits = 0
        for inst in range(10):
            p = random_problem(rng, 12)
            _, best = brute_force_minimum(p)
            result = simulated_annealing(p, AnnealConfig(seed=inst))
            hits += abs(result.best().energy - best) < 1e-9
        assert hits >= 9

    def test_energies_reevaluate_exactly(self):
        rng = Pcg32(9)
        p = random_problem(rng, 10)
        result = simulated_annealing(p, AnnealConfig(num_reads=8, sweeps=50, seed=1))
        for record in result.records:
            assert record.energy == energy(p, record.bits)

    def test_monotone_budget(self):
        # same 50-instance suite as the acceptance sampler-quality criterion
        rng = Pcg32(202)
        for inst in range(50):
            p = random_problem(rng, 12)
            short = simulated_annealing(p, AnnealConfig(sweeps=50, seed=inst))
            long = simulated_annealing(p, AnnealConfig(sweeps=400, seed=inst))
            assert long.best().energy <= short.best().energy + 1e-12

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AnnealConfig(num_reads=0)
        with pytest.raises(ValueError):
            AnnealConfig(beta_start=1.0, beta_end=0.5)


class TestTabu:
    def test_one_variable(self):
        result = tabu_search(ONE_VAR, TabuConfig(restarts=1, seed=5))
        assert list(result.best().bits) == [1]
        assert result.best().energy == -1.0

    def test_two_variable_optimum_from_any_start(self):
        for seed in range(6):
            result = tabu_search(TWO_VAR, TabuConfig(restarts=1, seed=seed))
            assert list(result.best().bits) == [1, 1]
            assert result.best().energy == -1.0

    def test_oracle_recovery_rate(self):
        rng = Pcg32(13)
        hits = 0
        for inst in range(10):
            p = random_problem(rng, 12)
            _, best = brute_force_minimum(p)
            result = tabu_search(p, TabuConfig(seed=inst))
            hits += abs(result.best().energy - best) < 1e-9
        assert hits >= 9

    def test_determinism(self):
        rng = Pcg32(15)
        p = random_problem(rng, 14)
        cfg = TabuConfig(restarts=4, seed=2)
        assert sample_set_to_json(tabu_search(p, cfg)) == sample_set_to_json(
            tabu_search(p, cfg)
        )

    def test_tenure_clamped_with_warning(self):
        p = QuboProblem(3, {0: -1.0, 1: 0.5, 2: 0.25})
        with pytest.warns(UserWarning, match="clamped"):
            result = tabu_search(p, TabuConfig(restarts=1, tenure=10, seed=0))
        assert result.best().energy == -1.0


class TestSampleSet:
    def test_canonical_sort_and_merge(self):
        p = QuboProblem(2, {0: 1.0})
        assignments = np.array(
            [[1, 0], [0, 0], [0, 1], [0, 0]], dtype=np.uint8
        )
        result = make_sample_set(p, assignments, "test")
        assert [list(r.bits) for r in result.records] == [[0, 0], [0, 1], [1, 0]]
        assert [r.occurrences for r in result.records] == [2, 1, 1]
        assert [r.energy for r in result.records] == [0.0, 0.0, 1.0]


class _StubHandler(BaseHTTPRequestHandler):
    responder = None
    requests_seen: list = []

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length)) if length else None
        type(self).requests_seen.append(
            {"path": self.path, "auth": self.headers.get("Authorization"), "body": body}
        )
        status, payload = type(self).responder(body)
        encoded = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(encoded)))
        self.end_headers()
        self.wfile.write(encoded)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _StubHandler.requests_seen = []
    yield server, f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


class TestRemote:
    def test_echo_all_zeros(self, stub_server):
        server, endpoint = stub_server
        p = QuboProblem(3, {0: 1.0}, {(0, 1): 2.0}, constant=4.5)

        def responder(body):
            n = body["num_vars"]
            return 200, {"records": [{"bits": "0" * n, "energy": 4.5, "occurrences": 1}]}

        _StubHandler.responder = staticmethod(responder)
        result = remote_hybrid(p, RemoteSolverConfig(endpoint=endpoint, auth_token="tok"))
        assert len(result.records) == 1
        assert result.best().energy == 4.5
        assert result.source == "remote"
        seen = _StubHandler.requests_seen[0]
        assert seen["path"] == "/solve"
        assert seen["auth"] == "Bearer tok"
        assert seen["body"]["num_vars"] == 3

    def test_wrong_energy_rejected(self, stub_server):
        server, endpoint = stub_server
        p = QuboProblem(2, {0: 1.0})

        def responder(body):
            return 200, {"records": [{"bits": "00", "energy": 123.0, "occurrences": 1}]}

        _StubHandler.responder = staticmethod(responder)
        with pytest.raises(EnergyMismatchError):
            remote_hybrid(p, RemoteSolverConfig(endpoint=endpoint))

    def test_malformed_body_rejected(self, stub_server):
        server, endpoint = stub_server
        p = QuboProblem(2, {0: 1.0})

        def responder(body):
            return 200, {"unexpected": []}

        _StubHandler.responder = staticmethod(responder)
        with pytest.raises(SolverError):
            remote_hybrid(p, RemoteSolverConfig(endpoint=endpoint))

    def test_unreachable_without_fallback(self):
        p = QuboProblem(2, {0: -1.0})
        config = RemoteSolverConfig(endpoint="http://127.0.0.1:9", timeout=0.5)
        with pytest.raises(SolverError):
            remote_hybrid(p, config)

    def test_unreachable_with_fallback(self):
        p = QuboProblem(2, {0: -1.0})
        config = RemoteSolverConfig(
            endpoint="http://127.0.0.1:9", timeout=0.5, offline_fallback=True
        )
        result = remote_hybrid(p, config)
        assert result.source == "fallback"
        assert result.best().energy == -1.0


class TestRemoteProtocolEdges:
    def test_wrong_bit_length_is_malformed(self, stub_server):
        server, endpoint = stub_server
        p = QuboProblem(3, {0: 1.0})

        def responder(body):
            return 200, {"records": [{"bits": "01", "energy": 0.0, "occurrences": 1}]}

        _StubHandler.responder = staticmethod(responder)
        with pytest.raises(SolverError, match="malformed"):
            remote_hybrid(p, RemoteSolverConfig(endpoint=endpoint))

    def test_empty_records_rejected(self, stub_server):
        server, endpoint = stub_server
        p = QuboProblem(2, {0: 1.0})

        def responder(body):
            return 200, {"records": []}

        _StubHandler.responder = staticmethod(responder)
        with pytest.raises(SolverError):
            remote_hybrid(p, RemoteSolverConfig(endpoint=endpoint))


def test_remote_env_token_supplies_auth(stub_server, monkeypatch):
    server, endpoint = stub_server
    p = QuboProblem(2, {0: 1.0}, constant=0.5)

    def responder(body):
        return 200, {"records": [{"bits": "00", "energy": 0.5, "occurrences": 1}]}

    _StubHandler.responder = staticmethod(responder)
    monkeypatch.setenv("AQOCI_SOLVER_TOKEN", "from-env")
    remote_hybrid(p, RemoteSolverConfig(endpoint=endpoint))
    assert _StubHandler.requests_seen[-1]["auth"] == "Bearer from-env"
    # explicit config token wins over the environment
    remote_hybrid(p, RemoteSolverConfig(endpoint=endpoint, auth_token="explicit"))
    assert _StubHandler.requests_seen[-1]["auth"] == "Bearer explicit"
