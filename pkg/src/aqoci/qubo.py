"""QUBO and Ising problem types, exact energy evaluation, and a brute-force oracle.

A :class:`QuboProblem` stores the objective

    f(x) = constant + sum_i linear[i] * x_i + sum_{i<j} quadratic[(i, j)] * x_i * x_j

over binary variables. Storage is canonical strict-upper-triangular: symmetric
or lower-triangular input is folded into (i, j) with i < j on construction, and
diagonal entries fold into the linear terms (x_i^2 = x_i). Energies always
accumulate constant first, then linear terms by ascending index, then quadratic
terms by ascending index pair, so values reproduce exactly everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from ._accel import USE_NUMBA
from . import kernels
from .errors import DimensionError, OracleSizeError

ORACLE_MAX_VARS = 24


def _check_coeff(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{what} coefficient must be finite, got {value!r}")
    return value


def _check_index(i: int, num_vars: int) -> int:
    i = int(i)
    if not 0 <= i < num_vars:
        raise ValueError(f"variable index {i} out of range for {num_vars} variables")
    return i


@dataclass(frozen=True)
class QuboProblem:
    num_vars: int
    linear: Mapping[int, float] = dc_field(default_factory=dict)
    quadratic: Mapping[tuple[int, int], float] = dc_field(default_factory=dict)
    constant: float = 0.0

    def __post_init__(self):
        if int(self.num_vars) < 0:
            raise ValueError("num_vars must be non-negative")
        object.__setattr__(self, "num_vars", int(self.num_vars))
        lin: dict[int, float] = {}
        for i, v in self.linear.items():
            i = _check_index(i, self.num_vars)
            lin[i] = lin.get(i, 0.0) + _check_coeff(v, "linear")
        quad: dict[tuple[int, int], float] = {}
        for (i, j), v in self.quadratic.items():
            i = _check_index(i, self.num_vars)
            j = _check_index(j, self.num_vars)
            v = _check_coeff(v, "quadratic")
            if i == j:
                lin[i] = lin.get(i, 0.0) + v
            else:
                key = (i, j) if i < j else (j, i)
                quad[key] = quad.get(key, 0.0) + v
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "quadratic", quad)
        object.__setattr__(self, "constant", _check_coeff(self.constant, "constant"))


@dataclass(frozen=True)
class IsingProblem:
    num_spins: int
    field: Mapping[int, float] = dc_field(default_factory=dict)
    coupling: Mapping[tuple[int, int], float] = dc_field(default_factory=dict)
    constant: float = 0.0

    def __post_init__(self):
        if int(self.num_spins) < 0:
            raise ValueError("num_spins must be non-negative")
        object.__setattr__(self, "num_spins", int(self.num_spins))
        h: dict[int, float] = {}
        for i, v in self.field.items():
            h[_check_index(i, self.num_spins)] = h.get(int(i), 0.0) + _check_coeff(v, "field")
        J: dict[tuple[int, int], float] = {}
        for (i, j), v in self.coupling.items():
            i = _check_index(i, self.num_spins)
            j = _check_index(j, self.num_spins)
            if i == j:
                raise ValueError("coupling requires two distinct spins")
            key = (i, j) if i < j else (j, i)
            J[key] = J.get(key, 0.0) + _check_coeff(v, "coupling")
        object.__setattr__(self, "field", h)
        object.__setattr__(self, "coupling", J)
        object.__setattr__(self, "constant", _check_coeff(self.constant, "constant"))


def as_bits(assignment: Iterable[int], num_vars: int) -> np.ndarray:
    """Validate an assignment and return it as an int8 array of 0/1."""
    x = np.asarray(list(assignment) if not isinstance(assignment, np.ndarray) else assignment)
    if x.ndim != 1 or x.shape[0] != num_vars:
        raise DimensionError(f"assignment length {x.shape} does not match {num_vars} variables")
    x = x.astype(np.int8, copy=False)
    if x.size and not np.all((x == 0) | (x == 1)):
        raise ValueError("assignment entries must be 0 or 1")
    return x


def energy(problem: QuboProblem, assignment: Iterable[int]) -> float:
    """Exact energy of one assignment, accumulated in canonical term order."""
    x = as_bits(assignment, problem.num_vars)
    e = problem.constant
    for i in sorted(problem.linear):
        if x[i]:
            e += problem.linear[i]
    for i, j in sorted(problem.quadratic):
        if x[i] and x[j]:
            e += problem.quadratic[(i, j)]
    return float(e)


def ising_energy(problem: IsingProblem, spins: Iterable[int]) -> float:
    """Energy of a +/-1 spin assignment under field + coupling + constant."""
    s = np.asarray(list(spins) if not isinstance(spins, np.ndarray) else spins, dtype=np.float64)
    if s.ndim != 1 or s.shape[0] != problem.num_spins:
        raise DimensionError(f"spin vector length {s.shape} does not match {problem.num_spins}")
    if s.size and not np.all(np.abs(s) == 1.0):
        raise ValueError("spins must be +1 or -1")
    e = problem.constant
    for i in sorted(problem.field):
        e += problem.field[i] * s[i]
    for i, j in sorted(problem.coupling):
        e += problem.coupling[(i, j)] * s[i] * s[j]
    return float(e)


class CompiledQubo(NamedTuple):
    """Flat array view of a QuboProblem for the kernels."""

    num_vars: int
    constant: float
    lin_idx: np.ndarray
    lin_val: np.ndarray
    quad_i: np.ndarray
    quad_j: np.ndarray
    quad_val: np.ndarray
    lin_dense: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray


def compile_problem(problem: QuboProblem) -> CompiledQubo:
    n = problem.num_vars
    lin_items = sorted(problem.linear.items())
    lin_idx = np.array([i for i, _ in lin_items], dtype=np.int64)
    lin_val = np.array([v for _, v in lin_items], dtype=np.float64)
    quad_items = sorted(problem.quadratic.items())
    quad_i = np.array([i for (i, _), _ in quad_items], dtype=np.int64)
    quad_j = np.array([j for (_, j), _ in quad_items], dtype=np.int64)
    quad_val = np.array([v for _, v in quad_items], dtype=np.float64)

    lin_dense = np.zeros(n, dtype=np.float64)
    lin_dense[lin_idx] = lin_val

    deg = np.zeros(n, dtype=np.int64)
    for i, j in zip(quad_i, quad_j):
        deg[i] += 1
        deg[j] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.zeros(indptr[-1], dtype=np.int64)
    data = np.zeros(indptr[-1], dtype=np.float64)
    pos = indptr[:-1].copy()
    for i, j, v in zip(quad_i, quad_j, quad_val):
        indices[pos[i]] = j
        data[pos[i]] = v
        pos[i] += 1
        indices[pos[j]] = i
        data[pos[j]] = v
        pos[j] += 1
    return CompiledQubo(
        n, float(problem.constant), lin_idx, lin_val, quad_i, quad_j, quad_val,
        lin_dense, indptr, indices, data,
    )


def energies(problem: QuboProblem, bits_matrix: np.ndarray) -> np.ndarray:
    """Canonical energies for each row of a (m, num_vars) 0/1 matrix."""
    c = compile_problem(problem)
    bits_matrix = np.ascontiguousarray(bits_matrix, dtype=np.uint8)
    if bits_matrix.ndim != 2 or bits_matrix.shape[1] != c.num_vars:
        raise DimensionError("bits matrix width does not match problem size")
    return kernels.energy_batch(
        bits_matrix, c.constant, c.lin_idx, c.lin_val, c.quad_i, c.quad_j, c.quad_val
    )


def _code_to_bits(code: int, n: int) -> np.ndarray:
    bits = np.zeros(n, dtype=np.int8)
    for i in range(n):
        bits[i] = (int(code) >> (n - 1 - i)) & 1
    return bits


def _brute_force_numpy(c: CompiledQubo) -> tuple[int, float]:
    """Vectorized fallback scan in blocks of at most 2**16 assignments."""
    n = c.num_vars
    block_bits = min(n, 16)
    block = 1 << block_bits
    lin_shift = (n - 1 - c.lin_idx).astype(np.uint64)
    shift_i = (n - 1 - c.quad_i).astype(np.uint64)
    shift_j = (n - 1 - c.quad_j).astype(np.uint64)
    one = np.uint64(1)
    best_v, best_e = 0, np.inf
    for hi in range(1 << (n - block_bits)):
        base = hi << block_bits
        codes = np.arange(base, base + block, dtype=np.uint64)
        e = np.full(block, c.constant, dtype=np.float64)
        for t in range(lin_shift.shape[0]):
            e += c.lin_val[t] * ((codes >> lin_shift[t]) & one)
        for t in range(shift_i.shape[0]):
            e += c.quad_val[t] * (
                ((codes >> shift_i[t]) & one) & ((codes >> shift_j[t]) & one)
            )
        k = int(np.argmin(e))
        if e[k] < best_e:
            best_e = float(e[k])
            best_v = base + k
    return best_v, best_e


def brute_force_minimum(problem: QuboProblem) -> tuple[np.ndarray, float]:
    """Exhaustive minimum over all assignments; ties go to the
    lexicographically smallest bit-vector (bit 0 most significant)."""
    n = problem.num_vars
    if n > ORACLE_MAX_VARS:
        raise OracleSizeError(
            f"brute force supports at most {ORACLE_MAX_VARS} variables, got {n}"
        )
    c = compile_problem(problem)
    if USE_NUMBA:
        lin_shift = (n - 1 - c.lin_idx).astype(np.uint64)
        shift_i = (n - 1 - c.quad_i).astype(np.uint64)
        shift_j = (n - 1 - c.quad_j).astype(np.uint64)
        code, best = kernels.brute_force_scan(
            n, c.constant, lin_shift, c.lin_val, shift_i, shift_j, c.quad_val
        )
    else:
        code, best = _brute_force_numpy(c)
    return _code_to_bits(int(code), n), float(best)


def to_ising(problem: QuboProblem) -> IsingProblem:
    """QUBO -> Ising under x_i = (1 + s_i) / 2; energies agree assignment-wise."""
    h: dict[int, float] = {}
    J: dict[tuple[int, int], float] = {}
    const = problem.constant
    for i, v in sorted(problem.linear.items()):
        const += v / 2.0
        h[i] = h.get(i, 0.0) + v / 2.0
    for (i, j), v in sorted(problem.quadratic.items()):
        const += v / 4.0
        h[i] = h.get(i, 0.0) + v / 4.0
        h[j] = h.get(j, 0.0) + v / 4.0
        J[(i, j)] = J.get((i, j), 0.0) + v / 4.0
    return IsingProblem(problem.num_vars, h, J, const)


def spins_from_bits(bits: Iterable[int]) -> np.ndarray:
    """Map binary 0/1 to spins -1/+1 consistently with :func:`to_ising`."""
    x = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.int64)
    return 2 * x - 1


def problem_to_dict(problem: QuboProblem) -> dict:
    return {
        "num_vars": problem.num_vars,
        "linear": {str(i): v for i, v in sorted(problem.linear.items())},
        "quadratic": {f"{i},{j}": v for (i, j), v in sorted(problem.quadratic.items())},
        "constant": problem.constant,
    }


def problem_from_dict(payload: Mapping) -> QuboProblem:
    linear = {int(k): float(v) for k, v in payload.get("linear", {}).items()}
    quadratic = {}
    for k, v in payload.get("quadratic", {}).items():
        i, j = k.split(",")
        quadratic[(int(i), int(j))] = float(v)
    return QuboProblem(
        num_vars=int(payload["num_vars"]),
        linear=linear,
        quadratic=quadratic,
        constant=float(payload.get("constant", 0.0)),
    )


def problem_to_json(problem: QuboProblem) -> str:
    return json.dumps(problem_to_dict(problem), sort_keys=True)


def problem_from_json(text: str) -> QuboProblem:
    return problem_from_dict(json.loads(text))
