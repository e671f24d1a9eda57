"""Heuristic QUBO samplers: simulated annealing, multistart tabu search, and a
remote hybrid-solver client with an offline fallback.

Both local heuristics are deterministic functions of (problem, config): reads
and restarts derive child seeds as ``seed ^ index``, results merge in index
order and are then sorted canonically (energy ascending, then lexicographic
bit-vector). Every reported energy is re-evaluated with the canonical
energy function, so it always matches :func:`aqoci.qubo.energy` exactly.
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass

import numpy as np
import requests

from . import kernels
from .errors import DimensionError, EnergyMismatchError, SolverError
from .qubo import QuboProblem, as_bits, compile_problem, energies, problem_to_dict
from .rng import U64

SOLVER_TOKEN_ENV = "AQOCI_SOLVER_TOKEN"


@dataclass(frozen=True)
class SampleRecord:
    bits: np.ndarray
    energy: float
    occurrences: int

    def __eq__(self, other):
        if not isinstance(other, SampleRecord):
            return NotImplemented
        return (
            np.array_equal(self.bits, other.bits)
            and self.energy == other.energy
            and self.occurrences == other.occurrences
        )


@dataclass(frozen=True)
class SampleSet:
    records: tuple[SampleRecord, ...]
    source: str

    def best(self) -> SampleRecord:
        if not self.records:
            raise SolverError("empty sample set")
        return self.records[0]


def make_sample_set(problem: QuboProblem, assignments: np.ndarray, source: str) -> SampleSet:
    """Deduplicate assignments, evaluate canonically, sort canonically."""
    assignments = np.ascontiguousarray(assignments, dtype=np.uint8)
    merged: dict[bytes, int] = {}
    rows: dict[bytes, np.ndarray] = {}
    for row in assignments:
        key = row.tobytes()
        merged[key] = merged.get(key, 0) + 1
        rows.setdefault(key, row)
    uniq = list(rows)
    bits_matrix = np.stack([rows[key] for key in uniq]) if uniq else np.zeros((0, problem.num_vars), np.uint8)
    energy_vals = energies(problem, bits_matrix) if uniq else np.zeros(0)
    records = [
        SampleRecord(rows[key].astype(np.int8), float(energy_vals[t]), merged[key])
        for t, key in enumerate(uniq)
    ]
    records.sort(key=lambda r: (r.energy, tuple(r.bits)))
    return SampleSet(tuple(records), source)


def sample_set_to_dict(sample_set: SampleSet) -> dict:
    return {
        "source": sample_set.source,
        "records": [
            {
                "bits": "".join(str(int(b)) for b in r.bits),
                "energy": r.energy,
                "occurrences": r.occurrences,
            }
            for r in sample_set.records
        ],
    }


def sample_set_to_json(sample_set: SampleSet) -> str:
    return json.dumps(sample_set_to_dict(sample_set), sort_keys=True)


@dataclass(frozen=True)
class AnnealConfig:
    """Simulated-annealing budget and schedule.

    ``beta_end=None`` resolves per problem to 10 / max|coefficient|, keeping
    the end-of-schedule acceptance meaningful across problem magnitudes.
    """

    num_reads: int = 32
    sweeps: int = 1000
    beta_start: float = 0.1
    beta_end: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1 or self.sweeps < 1:
            raise ValueError("num_reads and sweeps must be >= 1")
        if not self.beta_start > 0:
            raise ValueError("beta_start must be positive")
        if self.beta_end is not None and not self.beta_end > self.beta_start:
            raise ValueError("need beta_start < beta_end")


@dataclass(frozen=True)
class TabuConfig:
    """Multistart tabu budget. ``tenure``/``max_no_improve`` default per
    problem to max(4, n/10) and 2n."""

    restarts: int = 16
    tenure: int | None = None
    max_no_improve: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tenure is not None and self.tenure < 1:
            raise ValueError("tenure must be >= 1")
        if self.max_no_improve is not None and self.max_no_improve < 1:
            raise ValueError("max_no_improve must be >= 1")


@dataclass(frozen=True)
class RemoteSolverConfig:
    endpoint: str
    auth_token: str | None = None
    timeout: float = 30.0
    offline_fallback: bool = False

    def __post_init__(self):
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")


def _seed64(seed: int) -> np.uint64:
    return U64(int(seed) & 0xFFFFFFFFFFFFFFFF)


def _beta_schedule(problem: QuboProblem, config: AnnealConfig) -> np.ndarray:
    beta_end = config.beta_end
    if beta_end is None:
        sigma = max(
            (abs(v) for v in list(problem.linear.values()) + list(problem.quadratic.values())),
            default=1.0,
        )
        sigma = sigma if sigma > 0 else 1.0
        beta_end = 10.0 / sigma
        if beta_end <= config.beta_start:
            beta_end = 2.0 * config.beta_start
    if config.sweeps == 1:
        return np.array([beta_end], dtype=np.float64)
    ratio = (beta_end / config.beta_start) ** (1.0 / (config.sweeps - 1))
    return config.beta_start * ratio ** np.arange(config.sweeps, dtype=np.float64)


def simulated_annealing(problem: QuboProblem, config: AnnealConfig) -> SampleSet:
    """Single-bit-flip annealing with a geometric beta ramp.

    Per read: random initial assignment, ``sweeps`` full passes proposing
    flips in index order, acceptance probability min(1, exp(-beta * dE)).
    """
    if problem.num_vars < 1:
        raise ValueError("need at least one variable")
    c = compile_problem(problem)
    betas = _beta_schedule(problem, config)
    out = kernels.sa_run(
        c.lin_dense, c.indptr, c.indices, c.data,
        config.num_reads, config.sweeps, betas, _seed64(config.seed),
    )
    return make_sample_set(problem, out, "sa")


def tabu_search(problem: QuboProblem, config: TabuConfig) -> SampleSet:
    """Multistart tabu search; per-restart bests merged canonically."""
    if problem.num_vars < 1:
        raise ValueError("need at least one variable")
    n = problem.num_vars
    tenure = config.tenure if config.tenure is not None else max(4, n // 10)
    if tenure >= n:
        clamped = max(n - 1, 0)
        warnings.warn(
            f"tabu tenure {tenure} >= num_vars {n}; clamped to {clamped}", stacklevel=2
        )
        tenure = clamped
    max_no_improve = (
        config.max_no_improve if config.max_no_improve is not None else 2 * n
    )
    c = compile_problem(problem)
    out = kernels.tabu_run(
        c.lin_dense, c.indptr, c.indices, c.data,
        c.quad_i, c.quad_j, c.quad_val,
        config.restarts, tenure, max_no_improve, _seed64(config.seed),
    )
    return make_sample_set(problem, out, "tabu")


#: Config used when a remote solve falls back to local annealing.
FALLBACK_ANNEAL_CONFIG = AnnealConfig()


def remote_hybrid(problem: QuboProblem, config: RemoteSolverConfig) -> SampleSet:
    """POST the problem to ``endpoint``/solve and validate the returned records.

    Reported energies are checked against local evaluation (1e-6); the sample
    set is re-sorted canonically. If the endpoint is unreachable and
    ``offline_fallback`` is set, local simulated annealing runs instead and the
    result is marked with source="fallback".
    """
    url = config.endpoint.rstrip("/") + "/solve"
    headers = {"Content-Type": "application/json"}
    token = config.auth_token or os.environ.get(SOLVER_TOKEN_ENV)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    try:
        response = requests.post(
            url, json=problem_to_dict(problem), headers=headers, timeout=config.timeout
        )
        response.raise_for_status()
        payload = response.json()
    except (requests.ConnectionError, requests.Timeout) as exc:
        if config.offline_fallback:
            fallback = simulated_annealing(problem, FALLBACK_ANNEAL_CONFIG)
            return SampleSet(fallback.records, "fallback")
        raise SolverError(f"remote solver unreachable: {exc}") from exc
    except requests.RequestException as exc:
        raise SolverError(f"remote solve failed: {exc}") from exc

    try:
        raw_records = payload["records"]
        parsed = []
        for rec in raw_records:
            bits = as_bits([int(ch) for ch in rec["bits"]], problem.num_vars)
            reported = float(rec["energy"])
            occurrences = int(rec.get("occurrences", 1))
            if occurrences < 1:
                raise ValueError("occurrences must be positive")
            parsed.append((bits, reported, occurrences))
    except (KeyError, TypeError, ValueError, DimensionError) as exc:
        raise SolverError(f"malformed remote response: {exc}") from exc

    if not parsed:
        raise SolverError("remote response contained no records")
    bits_matrix = np.stack([bits for bits, _, _ in parsed]).astype(np.uint8)
    local = energies(problem, bits_matrix)
    for (bits, reported, _), local_e in zip(parsed, local):
        if abs(reported - float(local_e)) > 1e-6:
            raise EnergyMismatchError(
                f"remote energy {reported} deviates from local {float(local_e)}"
            )
    records = [
        SampleRecord(bits.astype(np.int8), float(local_e), occ)
        for (bits, _, occ), local_e in zip(parsed, local)
    ]
    records.sort(key=lambda r: (r.energy, tuple(r.bits)))
    return SampleSet(tuple(records), "remote")
