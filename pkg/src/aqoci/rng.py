"""Deterministic random-number primitives: splitmix64, PCG32, Box-Muller.

Every stochastic stage in the package (blob generation, sampler starts,
annealing acceptance, centroid picks) draws from PCG32 streams seeded through
splitmix64, so identical inputs reproduce identical outputs bit for bit.
"""

from __future__ import annotations

import numpy as np

from ._accel import maybe_jit

U64 = np.uint64

_MASK64 = U64(0xFFFFFFFFFFFFFFFF)
_MASK32 = U64(0xFFFFFFFF)
_PCG_MULT = U64(6364136223846793005)
_SM_GAMMA = U64(0x9E3779B97F4A7C15)
_SM_MIX1 = U64(0xBF58476D1CE4E5B9)
_SM_MIX2 = U64(0x94D049BB133111EB)

TWO_POW_32 = 4294967296


@maybe_jit("UniTuple(uint64, 2)(uint64)")
def splitmix64_next(state):
    """One splitmix64 step: returns (output, new_state)."""
    state = (state + _SM_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> U64(30))) * _SM_MIX1) & _MASK64
    z = ((z ^ (z >> U64(27))) * _SM_MIX2) & _MASK64
    return z ^ (z >> U64(31)), state


@maybe_jit("UniTuple(uint64, 2)(uint64, uint64)")
def pcg32_next(state, inc):
    """One PCG32 (XSH-RR 64/32) step: returns (32-bit output, new_state)."""
    old = state
    state = (old * _PCG_MULT + inc) & _MASK64
    xorshifted = (((old >> U64(18)) ^ old) >> U64(27)) & _MASK32
    rot = old >> U64(59)
    out = ((xorshifted >> rot) | ((xorshifted << ((U64(64) - rot) & U64(31))) & _MASK32)) & _MASK32
    return out, state


@maybe_jit("UniTuple(uint64, 2)(uint64, uint64)")
def pcg32_seed(initstate, initseq):
    """Reference PCG32 stream initialization: returns (state, inc)."""
    inc = ((initseq << U64(1)) | U64(1)) & _MASK64
    state = U64(0)
    _, state = pcg32_next(state, inc)
    state = (state + initstate) & _MASK64
    _, state = pcg32_next(state, inc)
    return state, inc


@maybe_jit("UniTuple(uint64, 2)(uint64)")
def pcg32_init(seed):
    """Expand a single 64-bit seed into a PCG32 stream via splitmix64."""
    initstate, s = splitmix64_next(seed)
    initseq, s = splitmix64_next(s)
    return pcg32_seed(initstate, initseq)


def mix_seed(seed: int, salt: int) -> int:
    """Derive a decorrelated child seed from (seed, salt), e.g. per loop iteration."""
    base = U64((int(seed) ^ int(salt)) & 0xFFFFFFFFFFFFFFFF)
    out, _ = splitmix64_next(base)
    return int(out)


class Pcg32:
    """A seeded PCG32 stream with uniform / integer / normal helpers."""

    def __init__(self, seed: int):
        state, inc = pcg32_init(U64(int(seed) & 0xFFFFFFFFFFFFFFFF))
        self._state = state
        self._inc = inc
        self._spare_normal: float | None = None

    def next_u32(self) -> int:
        out, self._state = pcg32_next(self._state, self._inc)
        return int(out)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return self.next_u32() / TWO_POW_32

    def uniform_range(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def randrange(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        limit = TWO_POW_32 - (TWO_POW_32 % n)
        while True:
            u = self.next_u32()
            if u < limit:
                return u % n

    def sample_indices(self, n: int, k: int) -> np.ndarray:
        """k distinct indices from range(n) by partial Fisher-Yates shuffle."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = np.arange(n, dtype=np.int64)
        for i in range(k):
            j = i + self.randrange(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k].copy()

    def normal(self) -> float:
        """Standard normal via Box-Muller; one uniform pair yields two values."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        u1 = (self.next_u32() + 1) / TWO_POW_32  # (0, 1], keeps log finite
        u2 = self.next_u32() / TWO_POW_32
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        self._spare_normal = float(r * np.sin(theta))
        return float(r * np.cos(theta))
