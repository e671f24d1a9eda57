"""Signed fixed-point binary encoding of real weights into qubits.

Each encoded weight occupies ``bits`` qubits ordered most-significant first.
The signed interpretation gives the leading qubit the negative weight
-2**(bits-1) (two's complement; one's complement adds the low-order +1
correction) and the remaining qubits the powers 2**(bits-2) ... 2**0. The
adaptive refinement loop instead reads the same qubit group as an unsigned
integer on the grid value = b * scale + offset; both decodes live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import DimensionError, RangeError

TWOS_COMPLEMENT = "twos_complement"
ONES_COMPLEMENT = "ones_complement"


@dataclass(frozen=True)
class FixedPointCodec:
    """Per-weight qubit encoding: total qubit count and sign convention.

    ``bits`` may be 1, a degenerate sign-only signed grid; the unsigned grid
    used by the adaptive loop is well defined for any ``bits >= 1``.
    """

    bits: int
    sign_mode: str = TWOS_COMPLEMENT

    def __post_init__(self):
        if int(self.bits) < 1:
            raise ValueError("codec needs at least one qubit per weight")
        object.__setattr__(self, "bits", int(self.bits))
        if self.sign_mode not in (TWOS_COMPLEMENT, ONES_COMPLEMENT):
            raise ValueError(f"unknown sign mode {self.sign_mode!r}")

    @property
    def min_int(self) -> int:
        return -(1 << (self.bits - 1))

    @property
    def max_int(self) -> int:
        return (1 << (self.bits - 1)) - 1

    @property
    def max_unsigned(self) -> int:
        return (1 << self.bits) - 1


@dataclass(frozen=True)
class ScaleOffsetEntry:
    """Affine map from an integer grid code to a real: value * scale + offset."""

    scale: float
    offset: float

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be positive and finite, got {self.scale!r}")
        if not math.isfinite(self.offset):
            raise ValueError(f"offset must be finite, got {self.offset!r}")


def qubit_weights(codec: FixedPointCodec) -> list[int]:
    """Signed weight of each qubit, most significant first.

    bits = 4 in two's complement gives [-8, 4, 2, 1]: the sign qubit carries
    -2**(bits-1) and the value qubits the remaining powers of two.
    """
    sign = -(1 << (codec.bits - 1))
    if codec.sign_mode == ONES_COMPLEMENT:
        sign += 1
    return [sign] + [1 << p for p in range(codec.bits - 2, -1, -1)]


def _group_bits(codec: FixedPointCodec, bits_in: Iterable[int]) -> list[int]:
    bits = [int(b) for b in bits_in]
    if len(bits) != codec.bits:
        raise DimensionError(f"expected {codec.bits} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0 or 1")
    return bits


def decode_integer(codec: FixedPointCodec, bits_in: Iterable[int]) -> int:
    """Signed integer for a qubit group: dot product with the qubit weights."""
    bits = _group_bits(codec, bits_in)
    return sum(w * b for w, b in zip(qubit_weights(codec), bits))


def encode_integer(codec: FixedPointCodec, value: int) -> list[int]:
    """Inverse of :func:`decode_integer` on the representable range."""
    value = int(value)
    if codec.sign_mode == TWOS_COMPLEMENT:
        if not codec.min_int <= value <= codec.max_int:
            raise RangeError(f"{value} outside [{codec.min_int}, {codec.max_int}]")
        code = value & codec.max_unsigned
    else:
        top = codec.max_int
        if not -top <= value <= top:
            raise RangeError(f"{value} outside [{-top}, {top}]")
        code = value if value >= 0 else (1 << (codec.bits - 1)) + (value + top)
    return [(code >> (codec.bits - 1 - t)) & 1 for t in range(codec.bits)]


def decode_unsigned(codec: FixedPointCodec, bits_in: Iterable[int]) -> int:
    """Unsigned integer for a qubit group (the adaptive-loop grid code)."""
    bits = _group_bits(codec, bits_in)
    value = 0
    for b in bits:
        value = (value << 1) | b
    return value


def to_real(value: int, entry: ScaleOffsetEntry) -> float:
    """Grid code to real: value * scale + offset."""
    return float(value) * entry.scale + entry.offset


def initial_scale(upper: float, lower: float, bits: int) -> float:
    """Starting grid pitch: (upper - lower) / (2**bits - 1)."""
    if not upper > lower:
        raise RangeError(f"need upper > lower, got {upper} <= {lower}")
    if int(bits) < 1:
        raise ValueError("bits must be >= 1")
    return (upper - lower) / float((1 << int(bits)) - 1)
