"""Shared fixtures and independent oracles.

The oracles here are deliberately written as plain Python loops, straight
from the behavioural description, and share no code with the package: the
production paths are checked against them, never the other way around.
"""

from __future__ import annotations

import numpy as np
import pytest

from framesync import SyncParams


def bits(s: str) -> np.ndarray:
    """'110101' -> uint8 array."""
    return np.array([int(c) for c in s], dtype=np.uint8)


def brute_correlate(a, b) -> int:
    assert len(a) == len(b)
    return sum(1 for x, y in zip(a, b) if int(x) == int(y))


def brute_scan(stream, sync) -> list[int]:
    """Sliding correlation at every position, by definition."""
    n = len(sync)
    return [brute_correlate(stream[p : p + n], sync) for p in range(len(stream) - n + 1)]


def brute_block_detect(stream, params: SyncParams, sync) -> list[tuple[int, int, tuple]]:
    """Blockwise threshold detector written directly from the decision rule.

    The stream is zero-padded to B blocks of q and blocks 0 .. B+k are
    examined over the zero-extended stream. Within a block the maximum
    correlation wins, earliest position on ties; a winner at or above theta
    emits (position, sum, payload) and suppresses the next k-1 blocks.
    """
    n, q, k, theta = params.n, params.q, params.k, params.theta
    s_len = len(stream)
    nblocks_stream = (s_len + q - 1) // q
    last_block = nblocks_stream + k
    ext_len = (last_block + 1) * q + n + k * q
    ext = [int(b) for b in stream] + [0] * (ext_len - s_len)
    sync = [int(b) for b in sync]

    events = []
    next_allowed = 0
    for b in range(last_block + 1):
        best_sum = -1
        best_pos = -1
        for m in range(q):
            p = b * q + m
            s = sum(1 for j in range(n) if ext[p + j] == sync[j])
            if s > best_sum:
                best_sum = s
                best_pos = p
        if best_sum >= theta and b >= next_allowed:
            payload = tuple(ext[best_pos + n : best_pos + n + k * q])
            events.append((best_pos, best_sum, payload))
            next_allowed = b + k
    return events


def random_small_instance(rng: np.random.Generator):
    """A randomized small detector instance: params, sync word and a stream
    that may be empty, pure noise, all zeros, or carry planted frames."""
    n = int(rng.choice([4, 8, 12, 16]))
    q = int(rng.choice([c for c in (1, 2, 4) if n % c == 0]))
    k = int(rng.integers(1, 4))
    theta = int(rng.integers(1, n + 1))
    params = SyncParams(n, q, k, theta)
    sync = rng.integers(0, 2, n, dtype=np.uint8)

    kind = rng.integers(0, 4)
    if kind == 0:
        stream = np.zeros(0, dtype=np.uint8)
    elif kind == 1:
        stream = rng.integers(0, 2, int(rng.integers(1, 120)), dtype=np.uint8)
    elif kind == 2:
        stream = np.zeros(int(rng.integers(1, 80)), dtype=np.uint8)
    else:
        parts = []
        for _ in range(int(rng.integers(1, 3))):
            gap = int(rng.integers(0, 3 * q))
            payload = rng.integers(0, 2, k * q, dtype=np.uint8)
            parts += [np.zeros(gap, dtype=np.uint8), sync, payload]
        if rng.integers(0, 2):
            parts.append(rng.integers(0, 2, int(rng.integers(0, 2 * q + 1)), dtype=np.uint8))
        stream = np.concatenate(parts)
    return params, sync, stream


def event_tuples(events) -> list[tuple[int, int, tuple]]:
    return [(e.position, e.sum, tuple(int(b) for b in e.payload)) for e in events]


@pytest.fixture
def rng():
    return np.random.default_rng(20240815)
