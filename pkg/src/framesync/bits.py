"""Bit vectors, detector parameters, sync-word generation and packed-bit I/O.

Bit vectors are plain numpy uint8 arrays of 0/1 values. Index 0 is the
earliest-transmitted bit; index i+1 is transmitted after index i. All other
modules share this convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SyncParams:
    """Detector parameters: sync word length ``n``, parallel input width ``q``
    (bits consumed per cycle), payload length ``k`` (in blocks of q bits) and
    detection threshold ``theta`` (minimum matched-bit count).

    Construct through :func:`make_params` to get validation; direct
    construction is unchecked.
    """

    n: int
    q: int
    k: int
    theta: int

    @property
    def frame_bits(self) -> int:
        """Payload size in bits."""
        return self.k * self.q

    @property
    def slots(self) -> int:
        """Number of q-bit slots in the isolation window (n/q + 2)."""
        return self.n // self.q + 2

    @property
    def window_bits(self) -> int:
        """Isolation window size in bits (n + 2q)."""
        return self.n + 2 * self.q


def make_params(n: int, q: int, k: int, theta: int) -> SyncParams:
    """Validate and build :class:`SyncParams`.

    Raises ValueError when q > n, n is not a multiple of q, theta is outside
    (0, n], or k < 1.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if q > n:
        raise ValueError(f"q must not exceed n, got q={q} > n={n}")
    if n % q != 0:
        raise ValueError(f"n must be a multiple of q, got n={n}, q={q}")
    if not (0 < theta <= n):
        raise ValueError(f"theta must be in (0, n], got theta={theta}, n={n}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return SyncParams(n=n, q=q, k=k, theta=theta)


def as_bits(values) -> np.ndarray:
    """Coerce a sequence of 0/1 values to a uint8 bit array."""
    bits = np.asarray(values, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError(f"bit vector must be 1-D, got shape {bits.shape}")
    if bits.size and bits.max() > 1:
        raise ValueError("bit vector values must be 0 or 1")
    return bits


def gen_sync_word(n: int, seed: int) -> np.ndarray:
    """Generate a length-n random sync word, each bit 0/1 with equal chance.

    Uses numpy's PCG64 generator so the same seed yields the same word on
    every platform.
    """
    if n < 1:
        raise ValueError(f"sync word length must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def correlate(a, b) -> int:
    """Digital correlation of two equal-length bit vectors: the number of
    positions where they agree (XNOR and sum)."""
    a = as_bits(a)
    b = as_bits(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} != {b.size}")
    return int(np.count_nonzero(a == b))


def complement(v) -> np.ndarray:
    """Bitwise complement of a bit vector."""
    return (1 - as_bits(v)).astype(np.uint8)


def pack_bits(v) -> bytes:
    """Pack a bit vector into bytes, LSB-first within each byte.

    Bit at stream position 8*b + i becomes bit i of byte b; a final partial
    byte is zero-padded in its high bits.
    """
    return np.packbits(as_bits(v), bitorder="little").tobytes()


def unpack_bits(data: bytes, length: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`. ``length`` is the bit count to recover."""
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    if length > 8 * len(data):
        raise ValueError(f"requested {length} bits but only {8 * len(data)} available")
    if length == 0:
        return np.zeros(0, dtype=np.uint8)
    raw = np.frombuffer(data, dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little", count=length)
