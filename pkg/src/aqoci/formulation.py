"""Builds the centroid-initialization QUBO.

The objective sum_j ||v_j - W h_j||^2 is expanded with every W entry
substituted by its qubit group read as an unsigned integer times scale plus
offset, and every H entry a single qubit. Idempotence x^2 = x is applied
during expansion, constants are kept (reported energies then equal true
squared errors), cubic and quartic products are reduced to quadratic by
penalized auxiliary substitution, a one-hot column penalty is added for H, and
the whole polynomial is scaled and shifted into the final
:class:`~aqoci.qubo.QuboProblem`.

Variable order is fixed so bit-strings decode identically across runs: all W
qubits row-major by (feature, cluster) with the high bit first, then all H
qubits row-major, then auxiliary qubits in creation order.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .encoding import FixedPointCodec, ScaleOffsetEntry, decode_unsigned
from .errors import DegreeError, DimensionError, LayoutError
from .qubo import QuboProblem


def default_penalty(data: np.ndarray) -> float:
    """Data-scale penalty weight: 10 * (1 + max_j ||v_j||^2).

    Large enough in practice for the sampling pipeline (decode tolerates
    residual violations); use :func:`exactness_penalty` where the QUBO minimum
    must decode exactly.
    """
    data = np.asarray(data, dtype=np.float64)
    return 10.0 * (1.0 + float(np.max(np.sum(data * data, axis=0))))


@dataclass(frozen=True)
class CentroidProblem:
    """Instance description: data matrix (features x samples), cluster count,
    per-weight codec, penalty weights and the global scale/offset."""

    data: np.ndarray
    k: int
    codec: FixedPointCodec
    delta1: float | None = None
    delta2: float | None = None
    lam: float = 1.0
    global_offset: float = 0.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise DimensionError("data must be a d x n matrix with d, n >= 1")
        if not np.all(np.isfinite(data)):
            raise ValueError("data must be finite")
        object.__setattr__(self, "data", data)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if data.shape[1] < self.k:
            raise ValueError("need at least k samples")
        pen = default_penalty(data)
        if self.delta1 is None:
            object.__setattr__(self, "delta1", pen)
        if self.delta2 is None:
            object.__setattr__(self, "delta2", pen)
        for name in ("delta1", "delta2", "lam"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "global_offset", float(self.global_offset))

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]


@dataclass
class VariableLayout:
    """Deterministic qubit numbering for one assembled problem."""

    w_qubits: dict[tuple[int, int], list[int]]
    h_qubits: dict[tuple[int, int], int]
    aux_qubits: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def num_declared(self) -> int:
        return sum(len(g) for g in self.w_qubits.values()) + len(self.h_qubits)

    @property
    def num_vars(self) -> int:
        return self.num_declared + len(self.aux_qubits)


def make_layout(d: int, k: int, n: int, bits: int) -> VariableLayout:
    w_qubits: dict[tuple[int, int], list[int]] = {}
    idx = 0
    for a in range(d):
        for b in range(k):
            w_qubits[(a, b)] = list(range(idx, idx + bits))
            idx += bits
    h_qubits: dict[tuple[int, int], int] = {}
    for l in range(k):
        for j in range(n):
            h_qubits[(l, j)] = idx
            idx += 1
    return VariableLayout(w_qubits, h_qubits)


class PseudoBooleanPoly:
    """Multilinear pseudo-Boolean polynomial: sorted variable tuples -> coefficient.

    ``add`` applies idempotence by deduplicating repeated variables, so x^2
    never appears as such.
    """

    def __init__(self, terms: dict[tuple[int, ...], float] | None = None):
        self.terms: dict[tuple[int, ...], float] = dict(terms) if terms else {}

    def add(self, variables: Sequence[int], coeff: float) -> None:
        coeff = float(coeff)
        if coeff == 0.0:
            return
        key = tuple(sorted(set(int(v) for v in variables)))
        self.terms[key] = self.terms.get(key, 0.0) + coeff

    def add_poly(self, other: "PseudoBooleanPoly") -> None:
        for key, coeff in other.terms.items():
            self.terms[key] = self.terms.get(key, 0.0) + coeff

    def scaled(self, factor: float) -> "PseudoBooleanPoly":
        return PseudoBooleanPoly({k: v * factor for k, v in self.terms.items()})

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def coefficient(self, variables: Sequence[int]) -> float:
        return self.terms.get(tuple(sorted(set(int(v) for v in variables))), 0.0)

    def evaluate(self, bits: Sequence[int]) -> float:
        x = np.asarray(bits, dtype=np.int8)
        total = 0.0
        for key in sorted(self.terms):
            if all(x[v] for v in key):
                total += self.terms[key]
        return total


def build_objective(
    problem: CentroidProblem,
    entries: Sequence[ScaleOffsetEntry],
    layout: VariableLayout | None = None,
) -> PseudoBooleanPoly:
    """Full expansion of sum_j ||v_j - W h_j||^2 with encoded W and qubit H.

    ``entries`` holds one scale/offset per W entry in row-major (feature,
    cluster) order. Terms of degree up to 4 appear: q q' h from w^2 h within a
    cluster and q q' h h' from cross-cluster products.
    """
    d, n, k = problem.d, problem.n, problem.k
    bits = problem.codec.bits
    if layout is None:
        layout = make_layout(d, k, n, bits)
    if len(entries) != d * k:
        raise LayoutError(f"expected {d * k} scale/offset entries, got {len(entries)}")

    # per W entry: qubit indices and their real coefficients (2^t * scale)
    groups: dict[tuple[int, int], tuple[list[int], list[float], float]] = {}
    for a in range(d):
        for b in range(k):
            entry = entries[a * k + b]
            qs = layout.w_qubits[(a, b)]
            coeffs = [float(1 << (bits - 1 - t)) * entry.scale for t in range(bits)]
            groups[(a, b)] = (qs, coeffs, entry.offset)

    poly = PseudoBooleanPoly()
    V = problem.data
    for j in range(n):
        h_idx = [layout.h_qubits[(l, j)] for l in range(k)]
        for a in range(d):
            v = V[a, j]
            poly.add((), v * v)
            for l in range(k):
                qs, cs, o = groups[(a, l)]
                h = h_idx[l]
                # -2 v w h
                for q, c in zip(qs, cs):
                    poly.add((q, h), -2.0 * v * c)
                poly.add((h,), -2.0 * v * o)
                # w^2 h with x^2 = x
                for t, (q, c) in enumerate(zip(qs, cs)):
                    poly.add((q, h), c * c + 2.0 * o * c)
                    for t2 in range(t + 1, bits):
                        poly.add((q, qs[t2], h), 2.0 * c * cs[t2])
                poly.add((h,), o * o)
                # 2 w_l w_l' h_l h_l' for l < l'
                for l2 in range(l + 1, k):
                    qs2, cs2, o2 = groups[(a, l2)]
                    h2 = h_idx[l2]
                    for q, c in zip(qs, cs):
                        for q2, c2 in zip(qs2, cs2):
                            poly.add((q, q2, h, h2), 2.0 * c * c2)
                        poly.add((q, h, h2), 2.0 * c * o2)
                    for q2, c2 in zip(qs2, cs2):
                        poly.add((q2, h, h2), 2.0 * o * c2)
                    poly.add((h, h2), 2.0 * o * o2)
    return poly


def one_hot_penalty(layout: VariableLayout, k: int, n: int, delta2: float) -> PseudoBooleanPoly:
    """delta2 * sum_j (sum_l h_lj - 1)^2, expanded with h^2 = h."""
    poly = PseudoBooleanPoly()
    for j in range(n):
        hs = [layout.h_qubits[(l, j)] for l in range(k)]
        poly.add((), delta2)
        for i, h in enumerate(hs):
            poly.add((h,), -delta2)
            for h2 in hs[i + 1:]:
                poly.add((h, h2), 2.0 * delta2)
    return poly


def _reduce_terms(
    poly: PseudoBooleanPoly,
    delta1: float,
    next_index: int,
    aux_map: dict[tuple[int, int], int],
) -> PseudoBooleanPoly:
    """Iteratively substitute the most frequent variable pair in degree-3+
    terms with an auxiliary qubit until the polynomial is quadratic.

    Each fresh auxiliary y for the pair (i, j) adds the exactness penalty
    delta1 * (x_i x_j - 2 x_i y - 2 x_j y + 3 y); a pair that already has an
    auxiliary is reused without a second penalty.
    """
    if poly.degree > 4:
        raise DegreeError(f"cannot reduce degree-{poly.degree} polynomial (max 4)")

    terms = dict(poly.terms)
    high = {key for key in terms if len(key) >= 3}
    pair_terms: dict[tuple[int, int], set[tuple[int, ...]]] = {}
    # lazy max-heap over pair frequencies; stale entries are skipped on pop
    heap: list[tuple[int, tuple[int, int]]] = []

    def index_term(key):
        for i1 in range(len(key)):
            for i2 in range(i1 + 1, len(key)):
                pair = (key[i1], key[i2])
                group = pair_terms.setdefault(pair, set())
                group.add(key)
                heapq.heappush(heap, (-len(group), pair))

    def unindex_term(key):
        for i1 in range(len(key)):
            for i2 in range(i1 + 1, len(key)):
                group = pair_terms.get((key[i1], key[i2]))
                if group is not None:
                    group.discard(key)
                    if not group:
                        del pair_terms[(key[i1], key[i2])]

    for key in sorted(high):
        index_term(key)

    def pop_most_frequent():
        while heap:
            neg_count, pair = heapq.heappop(heap)
            group = pair_terms.get(pair)
            if group is not None and len(group) == -neg_count:
                return pair
        raise AssertionError("pair index out of sync")  # unreachable

    penalties = PseudoBooleanPoly()
    while high:
        pair = pop_most_frequent()
        if pair in aux_map:
            y = aux_map[pair]
        else:
            y = next_index
            next_index += 1
            aux_map[pair] = y
            penalties.add(pair, delta1)
            penalties.add((pair[0], y), -2.0 * delta1)
            penalties.add((pair[1], y), -2.0 * delta1)
            penalties.add((y,), 3.0 * delta1)
        for key in sorted(pair_terms[pair]):
            coeff = terms.pop(key)
            unindex_term(key)
            high.discard(key)
            new_key = tuple(sorted([v for v in key if v not in pair] + [y]))
            terms[new_key] = terms.get(new_key, 0.0) + coeff
            if len(new_key) >= 3:
                high.add(new_key)
                index_term(new_key)

    reduced = PseudoBooleanPoly(terms)
    reduced.add_poly(penalties)
    return reduced


def reduce_to_quadratic(
    poly: PseudoBooleanPoly, delta1: float, num_declared: int | None = None
) -> tuple[QuboProblem, dict[tuple[int, int], int]]:
    """Quadratize a degree <= 4 polynomial; returns the QUBO and the
    pair -> auxiliary-qubit map appended after the declared variables."""
    if num_declared is None:
        num_declared = 1 + max((max(k) for k in poly.terms if k), default=-1)
    aux_map: dict[tuple[int, int], int] = {}
    reduced = _reduce_terms(poly, delta1, num_declared, aux_map)
    return poly_to_qubo(reduced, num_declared + len(aux_map)), aux_map


def poly_to_qubo(poly: PseudoBooleanPoly, num_vars: int) -> QuboProblem:
    constant = 0.0
    linear: dict[int, float] = {}
    quadratic: dict[tuple[int, int], float] = {}
    for key, coeff in poly.terms.items():
        if len(key) == 0:
            constant += coeff
        elif len(key) == 1:
            linear[key[0]] = linear.get(key[0], 0.0) + coeff
        elif len(key) == 2:
            quadratic[key] = quadratic.get(key, 0.0) + coeff
        else:
            raise DegreeError(f"polynomial still has a degree-{len(key)} term")
    return QuboProblem(num_vars, linear, quadratic, constant)


def exactness_penalty(problem: CentroidProblem, entries: Sequence[ScaleOffsetEntry]) -> float:
    """Penalty weight provably large enough for exact quadratization.

    Every auxiliary qubit's reduced terms descend from objective terms that
    contained its substituted pair, so flipping one auxiliary away from its
    parent product changes the objective part by at most the total absolute
    coefficient mass over degree-3+ terms containing any single pair. The
    data-scale default alone can be beaten when the representable grid is much
    wider than the data (offset-coupled terms grow with the grid, not the
    data), so the bound here is structural.
    """
    poly = build_objective(problem, entries)
    mass: dict[tuple[int, int], float] = {}
    for key, coeff in poly.terms.items():
        if len(key) < 3:
            continue
        for i1 in range(len(key)):
            for i2 in range(i1 + 1, len(key)):
                pair = (key[i1], key[i2])
                mass[pair] = mass.get(pair, 0.0) + abs(coeff)
    bound = max(mass.values(), default=0.0)
    return max(default_penalty(problem.data), 1.0 + bound)


def assemble(
    problem: CentroidProblem, entries: Sequence[ScaleOffsetEntry]
) -> tuple[QuboProblem, VariableLayout]:
    """Objective + penalties -> final QUBO: lam * (reduced objective +
    one-hot penalty) + global_offset."""
    layout = make_layout(problem.d, problem.k, problem.n, problem.codec.bits)
    objective = build_objective(problem, entries, layout)
    reduced = _reduce_terms(objective, problem.delta1, layout.num_declared, layout.aux_qubits)
    reduced.add_poly(one_hot_penalty(layout, problem.k, problem.n, problem.delta2))
    total = reduced.scaled(problem.lam)
    total.add((), problem.global_offset)
    return poly_to_qubo(total, layout.num_vars), layout


@dataclass(frozen=True)
class DecodedSolution:
    w: np.ndarray  # d x k reals
    h: np.ndarray  # k x n 0/1, as sampled (violations not repaired here)
    one_hot_valid: bool


def decode_solution(
    best: np.ndarray,
    layout: VariableLayout,
    codec: FixedPointCodec,
    entries: Sequence[ScaleOffsetEntry],
) -> DecodedSolution:
    """Read W through the unsigned grid (code * scale + offset) and H directly.

    Columns of H that are not one-hot are reported via the validity flag, not
    repaired.
    """
    best = np.asarray(best)
    if best.ndim != 1 or best.shape[0] != layout.num_vars:
        raise DimensionError(
            f"bit vector length {best.shape} does not match layout ({layout.num_vars})"
        )
    d = max(a for a, _ in layout.w_qubits) + 1
    k = max(b for _, b in layout.w_qubits) + 1
    n = max(j for _, j in layout.h_qubits) + 1
    w = np.zeros((d, k))
    for (a, b), qs in layout.w_qubits.items():
        entry = entries[a * k + b]
        code = decode_unsigned(codec, [best[q] for q in qs])
        w[a, b] = code * entry.scale + entry.offset
    h = np.zeros((k, n), dtype=np.int8)
    for (l, j), q in layout.h_qubits.items():
        h[l, j] = best[q]
    valid = bool(np.all(h.sum(axis=0) == 1))
    return DecodedSolution(w, h, valid)


def layout_names(layout: VariableLayout) -> dict[str, int]:
    """Flat name -> variable-index map (the sidecar decoding schema)."""
    names: dict[str, int] = {}
    for (a, b), qs in sorted(layout.w_qubits.items()):
        for t, q in enumerate(qs):
            names[f"w[{a}][{b}].bit[{t}]"] = q
    for (l, j), q in sorted(layout.h_qubits.items()):
        names[f"h[{l}][{j}]"] = q
    for m, (_, idx) in enumerate(sorted(layout.aux_qubits.items(), key=lambda kv: kv[1])):
        names[f"aux[{m}]"] = idx
    return names


def layout_to_json(layout: VariableLayout) -> str:
    return json.dumps(layout_names(layout), sort_keys=True)


def layout_names_from_json(text: str) -> dict[str, int]:
    payload = json.loads(text)
    return {str(k): int(v) for k, v in payload.items()}
