"""Cycle-accurate model of the three-stage sync-word detector.

Per clock cycle the machine consumes one q-bit block:

* isolation window — an (n + 2q)-bit shift register organised as n/q + 2
  slots of q bits; input enters the last slot and every slot moves one slot
  toward index 0 each cycle.
* parallel correlation — the sync word is correlated against the q candidate
  offsets of the window, the maximum (with its offset m) is selected, and
  the result plus a snapshot of the window traverses an L-cycle pipeline
  with L = ceil(log2 n) + ceil(log2 q), the adder-tree and comparator-tree
  latency.
* frame capture — when the delayed maximum reaches the threshold, window
  bits m+n .. m+n+q-1 of the delayed snapshot are emitted for k consecutive
  cycles with the valid flag asserted; further detections are suppressed
  until the capture completes.

The pipeline is modelled functionally as an exact L-cycle delay of the
combinational result plus an L-deep snapshot FIFO; the per-level register
layout inside the trees is not observable at the interface.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .bits import SyncParams, as_bits
from .detector import DetectionEvent


def latency(n: int, q: int) -> int:
    """Pipeline depth of the adder trees plus the comparator tree:
    ceil(log2 n) + ceil(log2 q) clock cycles."""
    return math.ceil(math.log2(n)) + math.ceil(math.log2(q))


def window_shift(window: np.ndarray, block) -> np.ndarray:
    """Advance the isolation window one cycle: slot s takes slot s+1's
    contents and the new block enters the last slot."""
    window = as_bits(window)
    block = as_bits(block)
    q = block.size
    if q == 0 or window.size % q != 0 or window.size // q < 3:
        raise ValueError(
            f"window of {window.size} bits incompatible with {q}-bit blocks"
        )
    out = np.empty_like(window)
    out[:-q] = window[q:]
    out[-q:] = block
    return out


def correlate_window(window: np.ndarray, sync) -> np.ndarray:
    """Correlation of the sync word against each of the q candidate offsets:
    sums[m] counts positions j with window[m+j] == sync[j]."""
    window = as_bits(window)
    sync = as_bits(sync)
    n = sync.size
    q = (window.size - n) // 2
    if window.size != n + 2 * q or q < 1:
        raise ValueError(
            f"window of {window.size} bits does not fit sync of {n} bits plus 2q"
        )
    views = np.lib.stride_tricks.sliding_window_view(window, n)[:q]
    return (views == sync).sum(axis=1).astype(np.int64)


class CorrelationOutput(NamedTuple):
    sum: int
    m: int


def select_max(sums) -> CorrelationOutput:
    """Maximum correlation value and its candidate offset; ties go to the
    smallest offset, the earliest-transmitted candidate."""
    sums = np.asarray(sums)
    if sums.size < 1:
        raise ValueError("select_max needs at least one value")
    m = int(np.argmax(sums))
    return CorrelationOutput(sum=int(sums[m]), m=m)


@dataclass
class CycleOutput:
    """Per-cycle machine output. ``sum``/``m`` are the pipeline-delayed
    correlation result (the window of cycle t-L). ``payload_block`` is
    present exactly when ``valid`` is set; ``detected`` marks the first
    cycle of a capture."""

    cycle: int
    sum: int
    m: int
    valid: bool
    payload_block: Optional[np.ndarray]
    detected: bool = False


def output_position(cycle: int, m: int, params: SyncParams) -> int:
    """Stream index of the sync word's first bit for a detection emitted at
    the given cycle: (cycle - L - (n/q + 1)) * q + m, with block b consumed
    at cycle b."""
    lat = latency(params.n, params.q)
    warmup = lat + params.n // params.q + 1
    if cycle < warmup:
        raise ValueError(f"cycle {cycle} precedes warm-up ({warmup} cycles)")
    return (cycle - warmup) * params.q + m


class SyncMachine:
    """The detector state machine. Instances are single-threaded; create one
    per stream (or call :meth:`reset`)."""

    def __init__(self, params: SyncParams, sync):
        self.params = params
        self.sync = as_bits(sync)
        if self.sync.size != params.n:
            raise ValueError(f"sync word must be {params.n} bits, got {self.sync.size}")
        self.latency = latency(params.n, params.q)
        self.warmup_cycles = self.latency + params.n // params.q + 1
        self.reset()

    def reset(self) -> None:
        self._window = np.zeros(self.params.window_bits, dtype=np.uint8)
        self._pipe: deque = deque()
        self._capture_m = 0
        self._capture_left = 0
        self._cycle = -1

    @property
    def window(self) -> np.ndarray:
        """Copy of the isolation window register."""
        return self._window.copy()

    @property
    def pipeline_depth(self) -> int:
        return len(self._pipe)

    @property
    def capturing(self) -> bool:
        return self._capture_left > 0

    def step(self, block, allow_detect: bool = True) -> CycleOutput:
        """Consume one q-bit block and advance one clock cycle."""
        params = self.params
        block = as_bits(block)
        if block.size != params.q:
            raise ValueError(f"block must be {params.q} bits, got {block.size}")
        t = self._cycle = self._cycle + 1

        self._window = window_shift(self._window, block)
        now = select_max(correlate_window(self._window, self.sync))
        self._pipe.append((now.sum, now.m, self._window.copy()))
        if len(self._pipe) > self.latency:
            e_sum, e_m, e_win = self._pipe.popleft()
            filled = True
        else:
            # pipeline registers still hold their reset value
            e_sum, e_m, e_win = 0, 0, None
            filled = False

        n, q = params.n, params.q
        valid = False
        detected = False
        payload = None
        if self._capture_left > 0:
            payload = e_win[self._capture_m + n : self._capture_m + n + q].copy()
            valid = True
            self._capture_left -= 1
        elif (
            allow_detect
            and filled
            and t >= self.warmup_cycles
            and e_sum >= params.theta
        ):
            detected = True
            valid = True
            self._capture_m = e_m
            payload = e_win[e_m + n : e_m + n + q].copy()
            self._capture_left = params.k - 1

        return CycleOutput(
            cycle=t, sum=e_sum, m=e_m, valid=valid, payload_block=payload, detected=detected
        )

    def run(self, stream) -> list[DetectionEvent]:
        """Feed a whole stream plus the zero flush and collect every capture.

        Resets the machine, pads the stream to a multiple of q, then flushes
        with n/q + 2 + L + k zero blocks so trailing frames drain through the
        window and pipeline. A capture still in flight after the flush is
        completed with further zero blocks (detection disabled), so payloads
        are always full k*q bits.
        """
        self.reset()
        params = self.params
        stream = as_bits(stream)
        q = params.q
        pad = (-stream.size) % q
        if pad:
            stream = np.concatenate([stream, np.zeros(pad, dtype=np.uint8)])
        blocks = stream.reshape(-1, q)
        flush = params.n // q + 2 + self.latency + params.k
        zero_block = np.zeros(q, dtype=np.uint8)

        events: list[DetectionEvent] = []
        pending: list[np.ndarray] = []
        pending_pos = pending_sum = 0

        def consume(out: CycleOutput) -> None:
            nonlocal pending, pending_pos, pending_sum
            if out.detected:
                pending = [out.payload_block]
                pending_pos = output_position(out.cycle, out.m, params)
                pending_sum = out.sum
            elif out.valid:
                pending.append(out.payload_block)
            if out.valid and len(pending) == params.k:
                events.append(
                    DetectionEvent(pending_pos, pending_sum, np.concatenate(pending))
                )
                pending = []

        for blk in blocks:
            consume(self.step(blk))
        for _ in range(flush):
            consume(self.step(zero_block))
        while self._capture_left > 0:
            consume(self.step(zero_block, allow_detect=False))
        return events


def run(machine: SyncMachine, stream) -> list[DetectionEvent]:
    """Module-level alias for :meth:`SyncMachine.run`."""
    return machine.run(stream)
