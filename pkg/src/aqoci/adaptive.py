"""Adaptive refinement loop around formulate -> sample -> decode rounds.

Each W entry carries a (scale, offset) pair mapping its unsigned grid code b
to the real value b * scale + offset. After every round the scale divides by
the scale factor and the offset is re-centered so the current estimate is
preserved exactly: offset' = b * scale + offset - b * scale', hence
b * scale' + offset' equals the old decoded value. The loop runs a fixed
number of iterations; the relative error between successive decoded vectors is
recorded for diagnostics but never terminates the loop (it can oscillate and
stall the naive epsilon <= t rule).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .encoding import FixedPointCodec, ScaleOffsetEntry, decode_unsigned, initial_scale
from .errors import DimensionError, RangeError
from .formulation import CentroidProblem, assemble, decode_solution
from .qubo import brute_force_minimum
from .rng import mix_seed
from .samplers import (
    AnnealConfig,
    RemoteSolverConfig,
    SampleRecord,
    SampleSet,
    TabuConfig,
    remote_hybrid,
    simulated_annealing,
    tabu_search,
)

SamplerName = Literal["sa", "tabu", "remote", "oracle"]


@dataclass
class RefinementState:
    """Per-weight scale/offset lists plus the full iteration trace."""

    scales: np.ndarray
    offsets: np.ndarray
    iteration: int
    history: list[np.ndarray] = field(default_factory=list)
    scale_factor: float = 2.0
    lower_limit: float = -8.0
    upper_limit: float = 7.0
    bits: int = 4
    # per-iteration diagnostics (parallel to history)
    energies: list[float] = field(default_factory=list)
    relative_errors: list[float | None] = field(default_factory=list)
    scales_history: list[np.ndarray] = field(default_factory=list)
    offsets_history: list[np.ndarray] = field(default_factory=list)

    def entries(self) -> list[ScaleOffsetEntry]:
        return [ScaleOffsetEntry(float(s), float(o)) for s, o in zip(self.scales, self.offsets)]


@dataclass(frozen=True)
class LoopConfig:
    """Outer-loop settings: fixed iteration budget, value range, sampler choice."""

    max_iterations: int = 10
    tolerance: float = 1e-3  # advisory only; recorded, never used to stop
    sampler: SamplerName = "sa"
    anneal: AnnealConfig = AnnealConfig()
    tabu: TabuConfig = TabuConfig()
    remote: RemoteSolverConfig | None = None
    lower_limit: float = -8.0
    upper_limit: float = 7.0
    scale_factor: float = 2.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.scale_factor > 1:
            raise ValueError("scale_factor must be > 1")
        if not self.upper_limit > self.lower_limit:
            raise RangeError("need upper_limit > lower_limit")


def initialize_state(
    upper: float, lower: float, bits: int, num_weights: int, beta: float
) -> RefinementState:
    """All scales start at (upper - lower) / (2**bits - 1), all offsets at lower."""
    if not beta > 1:
        raise ValueError("scale factor must be > 1")
    scale = initial_scale(upper, lower, bits)
    return RefinementState(
        scales=np.full(num_weights, scale, dtype=np.float64),
        offsets=np.full(num_weights, float(lower), dtype=np.float64),
        iteration=0,
        scale_factor=float(beta),
        lower_limit=float(lower),
        upper_limit=float(upper),
        bits=int(bits),
    )


def update_entry(
    b: int,
    entry: ScaleOffsetEntry,
    bits: int,
    lower: float,
    upper: float,
    beta: float,
) -> ScaleOffsetEntry:
    """One refinement step for a single weight.

    The scale always divides by beta; the offset re-centers on the decoded
    value via offset' = b * scale + offset - b * scale'. For b = 0 the offset
    is unchanged, which keeps a weight pinned at the lower limit there.
    """
    b = int(b)
    if not 0 <= b <= (1 << int(bits)) - 1:
        raise RangeError(f"grid code {b} outside [0, {(1 << int(bits)) - 1}]")
    new_scale = entry.scale / beta
    new_offset = b * entry.scale + entry.offset - b * new_scale
    return ScaleOffsetEntry(new_scale, new_offset)


def relative_error(current: np.ndarray, previous: np.ndarray) -> float:
    """||current - previous|| / ||previous||; 0 if both equal, inf if the
    previous iterate is the zero vector and current differs."""
    current = np.asarray(current, dtype=np.float64)
    previous = np.asarray(previous, dtype=np.float64)
    if current.shape != previous.shape:
        raise DimensionError("relative_error needs vectors of equal length")
    diff = float(np.linalg.norm(current - previous))
    denom = float(np.linalg.norm(previous))
    if denom == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / denom


@dataclass(frozen=True)
class RefinementResult:
    w: np.ndarray  # d x k decoded centroids
    h: np.ndarray  # k x n assignment matrix, repaired to one-hot if needed
    h_raw: np.ndarray  # as sampled in the final round
    one_hot_valid: bool
    state: RefinementState


def _sample(problem, config: LoopConfig, iteration: int) -> SampleSet:
    if config.sampler == "oracle":
        bits, energy_val = brute_force_minimum(problem)
        record = SampleRecord(bits, energy_val, 1)
        return SampleSet((record,), "oracle")
    if config.sampler == "sa":
        cfg = replace(config.anneal, seed=mix_seed(config.anneal.seed, iteration))
        return simulated_annealing(problem, cfg)
    if config.sampler == "tabu":
        cfg = replace(config.tabu, seed=mix_seed(config.tabu.seed, iteration))
        return tabu_search(problem, cfg)
    if config.sampler == "remote":
        if config.remote is None:
            raise ValueError("remote sampler selected but no remote config given")
        return remote_hybrid(problem, config.remote)
    raise ValueError(f"unknown sampler {config.sampler!r}")


def _repair_one_hot(h: np.ndarray, sample_set: SampleSet, layout) -> np.ndarray:
    """Repair non-one-hot columns by argmax of occurrence-weighted h marginals."""
    k, n = h.shape
    total = sum(r.occurrences for r in sample_set.records)
    marginals = np.zeros((k, n))
    for record in sample_set.records:
        for (l, j), q in layout.h_qubits.items():
            marginals[l, j] += record.occurrences * record.bits[q]
    marginals /= total
    repaired = h.copy()
    for j in range(n):
        if repaired[:, j].sum() != 1:
            repaired[:, j] = 0
            repaired[int(np.argmax(marginals[:, j])), j] = 1
    return repaired


def run_refinement(
    data: np.ndarray,
    k: int,
    codec: FixedPointCodec,
    config: LoopConfig,
    delta1: float | None = None,
    delta2: float | None = None,
    lam: float = 1.0,
    global_offset: float = 0.0,
) -> RefinementResult:
    """Run the fixed-budget refinement loop and return decoded centroids.

    Per iteration: assemble the QUBO from the current scale/offset lists,
    sample it, decode each weight's unsigned grid code from the best record,
    re-center every scale/offset pair on its decoded value, and append the
    decoded real vector to the trace.
    """
    data = np.asarray(data, dtype=np.float64)
    d = data.shape[0]
    state = initialize_state(
        config.upper_limit, config.lower_limit, codec.bits, d * k, config.scale_factor
    )
    problem_template = dict(delta1=delta1, delta2=delta2, lam=lam, global_offset=global_offset)

    final_solution = None
    final_sample_set = None
    final_layout = None
    for iteration in range(config.max_iterations):
        entries = state.entries()
        problem = CentroidProblem(data, k, codec, **problem_template)
        qubo_problem, layout = assemble(problem, entries)
        sample_set = _sample(qubo_problem, config, iteration)
        best = sample_set.best()
        solution = decode_solution(best.bits, layout, codec, entries)

        decoded = np.empty(d * k, dtype=np.float64)
        new_scales = np.empty_like(state.scales)
        new_offsets = np.empty_like(state.offsets)
        for a in range(d):
            for b_idx in range(k):
                m = a * k + b_idx
                qs = layout.w_qubits[(a, b_idx)]
                code = decode_unsigned(codec, [best.bits[q] for q in qs])
                entry = entries[m]
                decoded[m] = code * entry.scale + entry.offset
                new_entry = update_entry(
                    code, entry, codec.bits,
                    config.lower_limit, config.upper_limit, config.scale_factor,
                )
                new_scales[m] = new_entry.scale
                new_offsets[m] = new_entry.offset

        state.scales_history.append(state.scales.copy())
        state.offsets_history.append(state.offsets.copy())
        state.energies.append(best.energy)
        state.relative_errors.append(
            relative_error(decoded, state.history[-1]) if state.history else None
        )
        state.history.append(decoded)
        state.scales = new_scales
        state.offsets = new_offsets
        state.iteration = iteration + 1
        final_solution = solution
        final_sample_set = sample_set
        final_layout = layout

    w = state.history[-1].reshape(d, k)
    h_raw = final_solution.h
    valid = final_solution.one_hot_valid
    h = h_raw if valid else _repair_one_hot(h_raw, final_sample_set, final_layout)
    return RefinementResult(w=w, h=h, h_raw=h_raw, one_hot_valid=valid, state=state)


def trace_to_dict(state: RefinementState) -> dict:
    return {
        "iterations": state.iteration,
        "scale_factor": state.scale_factor,
        "lower_limit": state.lower_limit,
        "upper_limit": state.upper_limit,
        "bits": state.bits,
        "per_iteration": [
            {
                "scales": list(map(float, state.scales_history[t])),
                "offsets": list(map(float, state.offsets_history[t])),
                "best_energy": state.energies[t],
                "decoded": list(map(float, state.history[t])),
                "relative_error": state.relative_errors[t],
            }
            for t in range(state.iteration)
        ],
    }


def trace_to_json(state: RefinementState) -> str:
    return json.dumps(trace_to_dict(state), sort_keys=True)
