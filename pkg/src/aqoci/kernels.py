"""Hot numeric kernels: energy evaluation, brute-force scan, SA and tabu inner loops.

All kernels are written in nopython-compatible style and compiled via
``maybe_jit``; with ``AQOCI_PURE_NUMPY=1`` the identical code runs as plain
Python, producing the same numbers. Energies accumulate in a fixed order
(constant, then linear terms by index, then quadratic terms by index pair) so
results are reproducible across runs, modes and platforms.
"""

from __future__ import annotations

import numpy as np

from ._accel import maybe_jit
from .rng import U64, pcg32_init, pcg32_next

_INV_2_32 = np.float64(2.0**-32)


@maybe_jit()
def energy_batch(bits, constant, lin_idx, lin_val, quad_i, quad_j, quad_val):
    """Energies of a batch of assignments (rows of ``bits``), canonical order."""
    m = bits.shape[0]
    out = np.empty(m, np.float64)
    for r in range(m):
        e = constant
        for t in range(lin_idx.shape[0]):
            if bits[r, lin_idx[t]] == 1:
                e += lin_val[t]
        for t in range(quad_i.shape[0]):
            if bits[r, quad_i[t]] == 1 and bits[r, quad_j[t]] == 1:
                e += quad_val[t]
        out[r] = e
    return out


@maybe_jit()
def brute_force_scan(n, constant, lin_shift, lin_val, quad_shift_i, quad_shift_j, quad_val):
    """Scan all 2**n assignments; return (best_code, best_energy).

    Assignment codes enumerate ascending with variable 0 in the most
    significant bit, so the strict ``<`` comparison leaves the
    lexicographically smallest minimizer in place on ties.
    """
    total = U64(1) << U64(n)
    one = U64(1)
    best_e = np.inf
    best_v = U64(0)
    v = U64(0)
    while v < total:
        e = constant
        for t in range(lin_shift.shape[0]):
            if (v >> lin_shift[t]) & one:
                e += lin_val[t]
        for t in range(quad_shift_i.shape[0]):
            if (v >> quad_shift_i[t]) & one and (v >> quad_shift_j[t]) & one:
                e += quad_val[t]
        if e < best_e:
            best_e = e
            best_v = v
        v += one
    return best_v, best_e


@maybe_jit()
def sa_run(lin_dense, indptr, indices, data, num_reads, sweeps, betas, seed):
    """Simulated annealing over single-bit flips; returns final bits per read.

    Read ``r`` runs on its own PCG32 stream seeded with ``seed ^ r``: the
    initial assignment and all acceptance draws come from that stream, so the
    result is independent of read execution order.
    """
    n = lin_dense.shape[0]
    out = np.zeros((num_reads, n), np.uint8)
    for r in range(num_reads):
        state, inc = pcg32_init(seed ^ U64(r))
        x = np.zeros(n, np.uint8)
        for i in range(n):
            b, state = pcg32_next(state, inc)
            x[i] = np.uint8(b & U64(1))
        for s in range(sweeps):
            beta = betas[s]
            for i in range(n):
                acc = lin_dense[i]
                for p in range(indptr[i], indptr[i + 1]):
                    if x[indices[p]] == 1:
                        acc += data[p]
                if x[i] == 1:
                    acc = -acc
                if acc <= 0.0:
                    x[i] = 1 - x[i]
                else:
                    u, state = pcg32_next(state, inc)
                    if u * _INV_2_32 < np.exp(-beta * acc):
                        x[i] = 1 - x[i]
        out[r, :] = x
    return out


@maybe_jit()
def tabu_run(
    lin_dense,
    indptr,
    indices,
    data,
    quad_i,
    quad_j,
    quad_val,
    restarts,
    tenure,
    max_no_improve,
    seed,
):
    """Multistart tabu search; returns the best assignment found per restart.

    Steepest descent over single-bit flips with flip gains maintained
    incrementally. A flipped variable is tabu for ``tenure`` moves unless the
    move would improve the restart-best energy (aspiration). A restart stops
    after ``max_no_improve`` consecutive non-improving moves.
    """
    n = lin_dense.shape[0]
    out = np.zeros((restarts, n), np.uint8)
    for r in range(restarts):
        state, inc = pcg32_init(seed ^ U64(r))
        x = np.zeros(n, np.uint8)
        for i in range(n):
            b, state = pcg32_next(state, inc)
            x[i] = np.uint8(b & U64(1))

        gain = np.empty(n, np.float64)
        for i in range(n):
            acc = lin_dense[i]
            for p in range(indptr[i], indptr[i + 1]):
                if x[indices[p]] == 1:
                    acc += data[p]
            gain[i] = -acc if x[i] == 1 else acc

        # constant-free energy; only differences matter here
        cur_e = 0.0
        for i in range(n):
            if x[i] == 1:
                cur_e += lin_dense[i]
        for t in range(quad_i.shape[0]):
            if x[quad_i[t]] == 1 and x[quad_j[t]] == 1:
                cur_e += quad_val[t]

        best_e = cur_e
        best_x = x.copy()
        tabu_until = np.zeros(n, np.int64)
        it = 0
        no_improve = 0
        while no_improve <= max_no_improve:
            it += 1
            best_gain = np.inf
            move = -1
            for i in range(n):
                g = gain[i]
                if tabu_until[i] >= it and not (cur_e + g < best_e):
                    continue
                if g < best_gain:
                    best_gain = g
                    move = i
            if move < 0:
                break  # unreachable while tenure < n; defensive
            delta = 1.0 if x[move] == 0 else -1.0
            x[move] = 1 - x[move]
            cur_e += gain[move]
            for p in range(indptr[move], indptr[move + 1]):
                j = indices[p]
                sgn = -1.0 if x[j] == 1 else 1.0
                gain[j] += sgn * data[p] * delta
            gain[move] = -gain[move]
            tabu_until[move] = it + tenure
            if cur_e < best_e:
                # re-evaluate exactly before accepting: the incremental energy
                # drifts, and phantom 1e-12 "improvements" would reset the
                # stop counter forever
                exact = 0.0
                for i in range(n):
                    if x[i] == 1:
                        exact += lin_dense[i]
                for t in range(quad_i.shape[0]):
                    if x[quad_i[t]] == 1 and x[quad_j[t]] == 1:
                        exact += quad_val[t]
                cur_e = exact
                if exact < best_e:
                    best_e = exact
                    best_x[:] = x
                    no_improve = 0
                else:
                    no_improve += 1
            else:
                no_improve += 1
        out[r, :] = best_x
    return out
