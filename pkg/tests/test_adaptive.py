import math

import numpy as np
import pytest

from aqoci.adaptive import (
    LoopConfig,
    initialize_state,
    relative_error,
    run_refinement,
    trace_to_json,
    update_entry,
)
from aqoci.encoding import FixedPointCodec, ScaleOffsetEntry
from aqoci.errors import DimensionError, RangeError
from aqoci.formulation import CentroidProblem, exactness_penalty
from aqoci.rng import Pcg32
from aqoci.samplers import AnnealConfig

ORACLE8 = LoopConfig(max_iterations=8, sampler="oracle")


class TestInitializeState:
    def test_default_range(self):
        state = initialize_state(7, -8, 4, 3, 2)
        assert state.scales.tolist() == [1.0, 1.0, 1.0]
        assert state.offsets.tolist() == [-8.0, -8.0, -8.0]
        assert state.iteration == 0

    def test_single_bit(self):
        state = initialize_state(1, 0, 1, 1, 2)
        assert state.scales.tolist() == [1.0]
        assert state.offsets.tolist() == [0.0]

    def test_wide_range(self):
        state = initialize_state(10, -10, 5, 2, 2)
        assert state.scales.tolist() == pytest.approx([20 / 31, 20 / 31])
        assert state.offsets.tolist() == [-10.0, -10.0]

    def test_bad_range(self):
        with pytest.raises(RangeError):
            initialize_state(-8, 7, 4, 1, 2)


class TestUpdateEntry:
    def test_zero_code_keeps_offset(self):
        entry = update_entry(0, ScaleOffsetEntry(1.0, -8.0), 4, -8, 7, 2)
        assert entry == ScaleOffsetEntry(0.5, -8.0)

    def test_midrange_recenters(self):
        entry = update_entry(3, ScaleOffsetEntry(1.0, 0.0), 4, -8, 7, 2)
        assert entry == ScaleOffsetEntry(0.5, 1.5)
        assert 3 * entry.scale + entry.offset == 3.0  # fixed point

    def test_saturated_code_recenters(self):
        entry = update_entry(15, ScaleOffsetEntry(1.0, -8.0), 4, -8, 7, 2)
        assert entry == ScaleOffsetEntry(0.5, -0.5)
        assert 15 * entry.scale + entry.offset == 7.0

    def test_code_out_of_range(self):
        with pytest.raises(RangeError):
            update_entry(16, ScaleOffsetEntry(1.0, 0.0), 4, -8, 7, 2)

    def test_value_preserved_for_random_entries(self):
        rng = Pcg32(21)
        for _ in range(200):
            bits = 1 + rng.randrange(6)
            code = rng.randrange(1 << bits)
            entry = ScaleOffsetEntry(rng.uniform_range(1e-3, 3.0), rng.uniform_range(-8, 8))
            updated = update_entry(code, entry, bits, -8, 8, 2.0)
            before = code * entry.scale + entry.offset
            after = code * updated.scale + updated.offset
            assert abs(before - after) <= 1e-12


class TestRelativeError:
    def test_identical(self):
        assert relative_error([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_simple_norms(self):
        assert relative_error([2.0, 0.0], [1.0, 0.0]) == 1.0
        assert relative_error([1.0, 1.0], [1.0, 0.0]) == 1.0

    def test_zero_previous(self):
        assert relative_error([0.0], [0.0]) == 0.0
        assert relative_error([1.0], [0.0]) == math.inf

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            relative_error([1.0], [1.0, 2.0])


class TestRunRefinement:
    def test_single_point_contracts(self):
        result = run_refinement(np.array([[4.9]]), 1, FixedPointCodec(4), ORACLE8)
        pitch = 15.0 / 2**8  # initial pitch 1, halved 8 times
        assert abs(result.w[0, 0] - 4.9) <= pitch / 2
        assert result.one_hot_valid

    def test_scales_contract_exactly(self):
        result = run_refinement(np.array([[4.9]]), 1, FixedPointCodec(4), ORACLE8)
        for t, scales in enumerate(result.state.scales_history):
            assert scales[0] == 1.0 / 2**t  # exact halving
        assert result.state.scales[0] == 1.0 / 2**8

    def test_exact_grid_value_is_fixed_point(self):
        result = run_refinement(np.array([[3.0]]), 1, FixedPointCodec(4), ORACLE8)
        assert result.state.history[0][0] == 3.0
        for decoded in result.state.history:
            assert decoded[0] == 3.0

    def test_two_separated_points(self):
        data = np.array([[-5.0, 5.0]])
        result = run_refinement(data, 2, FixedPointCodec(2), ORACLE8)
        final_pitch = result.state.scales[0]
        centroids = sorted(result.w[0].tolist())
        assert abs(centroids[0] + 5.0) <= final_pitch
        assert abs(centroids[1] - 5.0) <= final_pitch

    def test_objective_non_increasing_with_oracle(self):
        rng = Pcg32(3)
        for d, n, k, bits in [(1, 4, 2, 2), (2, 3, 2, 1), (1, 3, 1, 2)]:
            data = np.array(
                [[rng.uniform_range(-2, 2) for _ in range(n)] for _ in range(d)]
            )
            codec = FixedPointCodec(bits)
            config = LoopConfig(
                max_iterations=5, sampler="oracle", lower_limit=-2, upper_limit=2
            )
            entries0 = initialize_state(2, -2, bits, d * k, 2.0).entries()
            delta = exactness_penalty(CentroidProblem(data, k, codec), entries0)
            result = run_refinement(
                data, k, codec, config, delta1=delta, delta2=delta
            )
            objectives = []
            for decoded in result.state.history:
                w = decoded.reshape(d, k)
                cost = sum(
                    min(float(np.sum((data[:, j] - w[:, l]) ** 2)) for l in range(k))
                    for j in range(n)
                )
                objectives.append(cost)
            for prev, cur in zip(objectives, objectives[1:]):
                assert cur <= prev + 1e-9

    def test_trace_reproducible_with_sa(self):
        data = np.array([[0.5, 2.5, -1.0]])
        config = LoopConfig(
            max_iterations=3,
            sampler="sa",
            anneal=AnnealConfig(num_reads=4, sweeps=60, seed=11),
        )
        a = run_refinement(data, 1, FixedPointCodec(3), config)
        b = run_refinement(data, 1, FixedPointCodec(3), config)
        assert trace_to_json(a.state) == trace_to_json(b.state)

    def test_relative_error_recorded_not_terminating(self):
        data = np.array([[3.0]])  # exactly representable: error hits 0 immediately
        config = LoopConfig(max_iterations=6, sampler="oracle", tolerance=0.5)
        result = run_refinement(data, 1, FixedPointCodec(4), config)
        assert result.state.iteration == 6  # full budget despite zero error
        assert result.state.relative_errors[0] is None
        assert all(e == 0.0 for e in result.state.relative_errors[1:])

    def test_one_hot_violation_reported_and_repaired(self):
        # with k=1, a near-zero point and a tiny one-hot penalty, switching the
        # single h off is cheaper than paying the squared error of any grid value
        data = np.array([[0.0]])
        config = LoopConfig(max_iterations=1, sampler="oracle")
        result = run_refinement(
            data, 1, FixedPointCodec(1), config, delta2=1e-3
        )
        assert not result.one_hot_valid
        assert result.h_raw.sum() == 0
        assert result.h.sum(axis=0).tolist() == [1]  # repaired downstream copy
