"""Functional sync-word detector and analytic miss-rate oracle.

Mirrors the cycle model's decision rule without simulating cycles: slide the
sync word over the stream, group candidate positions into blocks of q, take
each block's maximum (earliest position wins ties), compare to the threshold
and suppress further detections for the k-block capture span.

The stream is conceptually zero-extended: after padding to a multiple of q
(B blocks), blocks 0 .. B+k are evaluated, matching what the cycle model
sees while its window and pipeline drain. Payloads are likewise read from
the zero-extended stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .bits import SyncParams, as_bits
from .kernels import CorrelationScanner


@dataclass(eq=False)
class DetectionEvent:
    """One reported capture: stream index of the sync word's first bit, the
    matched-bit count that crossed the threshold, and the k*q payload bits."""

    position: int
    sum: int
    payload: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, DetectionEvent):
            return NotImplemented
        return (
            self.position == other.position
            and self.sum == other.sum
            and np.array_equal(self.payload, other.payload)
        )

    def __repr__(self):
        body = "".join(str(int(b)) for b in self.payload[:16])
        tail = "..." if self.payload.size > 16 else ""
        return f"DetectionEvent(position={self.position}, sum={self.sum}, payload={body}{tail})"


def scan_positions(stream, sync, backend: str | None = None) -> np.ndarray:
    """Correlation value at every position p: matches between
    stream[p .. p+n-1] and the sync word, for p in 0 .. len(stream)-n."""
    stream = as_bits(stream)
    sync = as_bits(sync)
    if stream.size < sync.size:
        raise ValueError(
            f"stream of {stream.size} bits is shorter than the {sync.size}-bit sync word"
        )
    return CorrelationScanner(sync, backend=backend).scan(stream)


def block_events(
    corr: np.ndarray,
    q: int,
    theta: int,
    k: int,
    first_block: int = 0,
    next_allowed: int = 0,
) -> tuple[list[tuple[int, int]], int]:
    """Threshold the per-position correlations block by block.

    ``corr`` holds whole blocks of q consecutive positions starting at block
    index ``first_block``. A block whose maximum (earliest index on ties)
    reaches ``theta`` emits an event unless it falls inside a running capture
    span; an event at block b suppresses blocks b+1 .. b+k-1. Returns the
    events as (position, sum) pairs plus the updated suppression bound.
    """
    nblocks = corr.size // q
    view = corr.reshape(nblocks, q)
    bmax = view.max(axis=1)
    barg = view.argmax(axis=1)
    events = []
    for i in np.flatnonzero(bmax >= theta):
        b = first_block + int(i)
        if b < next_allowed:
            continue
        events.append((b * q + int(barg[i]), int(bmax[i])))
        next_allowed = b + k
    return events, next_allowed


class StreamScanner:
    """Incremental detector over a stream fed in arbitrary chunks.

    Produces exactly the (position, sum) events of :func:`detect` on the
    concatenated stream, independent of how the bits are split across
    ``feed`` calls. Only whole blocks with fully buffered correlation
    windows are evaluated per call; :meth:`finish` pads to a block boundary
    and drains the zero-extended tail.
    """

    def __init__(self, params: SyncParams, sync, backend: str | None = None):
        self.params = params
        self.sync = as_bits(sync)
        if self.sync.size != params.n:
            raise ValueError(f"sync word must be {params.n} bits, got {self.sync.size}")
        self._scanner = CorrelationScanner(self.sync, backend=backend)
        self._buf = np.zeros(0, dtype=np.uint8)
        self._base = 0  # global bit index of _buf[0]; always a block boundary
        self._next_allowed = 0
        self.total_bits = 0
        self._finished = False

    def feed(self, bits) -> list[tuple[int, int]]:
        if self._finished:
            raise RuntimeError("feed() after finish()")
        bits = as_bits(bits)
        self.total_bits += bits.size
        self._buf = np.concatenate([self._buf, bits])
        return self._drain(final_block=None)

    def finish(self) -> list[tuple[int, int]]:
        if self._finished:
            raise RuntimeError("finish() called twice")
        self._finished = True
        n, q, k = self.params.n, self.params.q, self.params.k
        nblocks_stream = -(-self.total_bits // q)  # ceil; 0-bit stream still drains
        last_block = nblocks_stream + k
        need = (last_block + 1) * q + n - 1  # bits through the last window
        pad = need - (self._base + self._buf.size)
        if pad > 0:
            self._buf = np.concatenate([self._buf, np.zeros(pad, dtype=np.uint8)])
        return self._drain(final_block=last_block)

    def _drain(self, final_block: int | None) -> list[tuple[int, int]]:
        n, q = self.params.n, self.params.q
        avail = self._base + self._buf.size
        if final_block is None:
            b_max = (avail + 1 - q - n) // q  # last block whose window is buffered
        else:
            b_max = final_block
        first = self._base // q
        if b_max < first:
            return []
        nblocks = b_max - first + 1
        corr = self._scanner.scan(self._buf[: nblocks * q + n - 1])
        events, self._next_allowed = block_events(
            corr, q, self.params.theta, self.params.k, first, self._next_allowed
        )
        self._buf = self._buf[nblocks * q :]
        self._base += nblocks * q
        return events


def zero_extended(stream: np.ndarray, start: int, length: int) -> np.ndarray:
    """Slice ``stream[start:start+length]``, reading zeros past the end."""
    out = np.zeros(length, dtype=np.uint8)
    avail = min(length, max(stream.size - start, 0))
    if avail > 0:
        out[:avail] = stream[start : start + avail]
    return out


def detect(stream, params: SyncParams, sync, backend: str | None = None) -> list[DetectionEvent]:
    """Run the blockwise threshold detector over a whole stream.

    Returns every capture with the stream index of the sync word's first
    bit, its correlation value and the k*q payload bits that follow it
    (zeros past the stream end).
    """
    stream = as_bits(stream)
    scanner = StreamScanner(params, sync, backend=backend)
    hits = scanner.feed(stream)
    hits += scanner.finish()
    pay = params.frame_bits
    return [
        DetectionEvent(pos, s, zero_extended(stream, pos + params.n, pay))
        for pos, s in hits
    ]


def miss_probability_model(n: int, theta: int, ber: float) -> float:
    """Probability that the true-position correlation misses the threshold
    under independent bit errors: P(X < theta) for X ~ Binomial(n, 1-ber).

    An order-of-magnitude oracle: it ignores the within-symbol error
    correlation of 16QAM and any competition from other candidate positions.
    """
    if not 0.0 <= ber <= 1.0:
        raise ValueError(f"ber must be in [0, 1], got {ber}")
    if theta <= 0:
        return 0.0
    return float(stats.binom.cdf(theta - 1, n, 1.0 - ber))
