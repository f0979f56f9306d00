"""Sliding bit-correlation kernels.

Computes, for every start position p in a bit stream, how many of the next
n stream bits agree with an n-bit pattern. This is the hot loop of the
functional detector: a full-scale run touches 10^8..10^9 positions.

Two interchangeable backends:

* ``numba`` (default when importable) — the stream is packed into uint64
  words and each position is scored as n minus the popcount of
  (window XOR pattern), using the native popcount instruction. Direct
  software analogue of an XNOR array feeding an adder tree.
* ``numpy`` — FFT cross-correlation of the 0/1 sequences plus a sliding
  window sum, combined through
  matches = n - ones(pattern) - window_ones + 2 * (stream x pattern).
  float64 rounding error is orders of magnitude below 0.5, so rounding
  recovers the exact integer counts.

Set FRAMESYNC_BACKEND=numpy (or numba) to force a backend; the numpy path
is also selected automatically when numba is not installed.
"""

from __future__ import annotations

import os

import numpy as np
from scipy import signal

try:
    from numba import njit, types
    from numba.extending import intrinsic
    from llvmlite import ir

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

_env = os.environ.get("FRAMESYNC_BACKEND", "").strip().lower()
if _env not in ("", "numba", "numpy"):
    raise RuntimeError(f"FRAMESYNC_BACKEND must be 'numba' or 'numpy', got {_env!r}")
if _env == "numba" and not HAVE_NUMBA:
    raise RuntimeError("FRAMESYNC_BACKEND=numba but numba is not installed")

#: Backend actually in use for :func:`scan_correlation`.
BACKEND = "numpy" if (_env == "numpy" or not HAVE_NUMBA) else "numba"


if HAVE_NUMBA:

    @intrinsic
    def _popcount64(typingctx, x):
        # llvm.ctpop compiles to the hardware popcount instruction
        sig = types.uint64(types.uint64)

        def codegen(context, builder, signature, args):
            (val,) = args
            fn = builder.module.declare_intrinsic("llvm.ctpop", [ir.IntType(64)])
            return builder.call(fn, [val])

        return sig, codegen

    @njit(cache=True, nogil=True)
    def _scan_packed(words, pat_words, pat_masks, n, npos, out):
        nw = pat_words.shape[1]
        for p in range(npos):
            wi = p >> 6
            r = p & 63
            mism = np.uint64(0)
            for j in range(nw):
                mism += _popcount64((words[wi + j] ^ pat_words[r, j]) & pat_masks[r, j])
            out[p] = n - np.int64(mism)
        return out


def _pack_shifted(pattern: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pattern and its valid-bit mask packed into uint64 words at each of the
    64 possible bit offsets within a word."""
    n = pattern.size
    nw = (n + 62) // 64 + 1
    pat_words = np.zeros((64, nw), dtype=np.uint64)
    pat_masks = np.zeros((64, nw), dtype=np.uint64)
    buf = np.zeros(nw * 64, dtype=np.uint8)
    for r in range(64):
        buf[:] = 0
        buf[r : r + n] = pattern
        pat_words[r] = np.packbits(buf, bitorder="little").view("<u8")
        buf[r : r + n] = 1
        pat_masks[r] = np.packbits(buf, bitorder="little").view("<u8")
    return pat_words, pat_masks


class CorrelationScanner:
    """Reusable scanner for one pattern; precomputes the packed/shifted forms
    so repeated chunked scans avoid per-call setup."""

    def __init__(self, pattern, backend: str | None = None):
        from .bits import as_bits

        self.pattern = as_bits(pattern)
        self.n = self.pattern.size
        if self.n < 1:
            raise ValueError("pattern must be non-empty")
        self.backend = backend or BACKEND
        if self.backend not in ("numba", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "numba" and not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        if self.backend == "numba":
            self._pat_words, self._pat_masks = _pack_shifted(self.pattern)
        else:
            self._pat_rev = self.pattern[::-1].astype(np.float64)
            self._pat_ones = int(self.pattern.sum())

    def scan(self, stream) -> np.ndarray:
        """Match counts for every position p in 0 .. len(stream) - n,
        as an int32 array."""
        from .bits import as_bits

        stream = as_bits(stream)
        if stream.size < self.n:
            raise ValueError(
                f"stream of {stream.size} bits is shorter than pattern of {self.n}"
            )
        if self.backend == "numba":
            return self._scan_numba(stream)
        return self._scan_numpy(stream)

    def _scan_numba(self, stream: np.ndarray) -> np.ndarray:
        npos = stream.size - self.n + 1
        nw = self._pat_words.shape[1]
        nwords = (stream.size + 63) // 64 + nw
        padded = np.zeros(nwords * 64, dtype=np.uint8)
        padded[: stream.size] = stream
        words = np.packbits(padded, bitorder="little").view("<u8")
        out = np.empty(npos, dtype=np.int32)
        _scan_packed(words, self._pat_words, self._pat_masks, self.n, npos, out)
        return out

    def _scan_numpy(self, stream: np.ndarray) -> np.ndarray:
        n = self.n
        x = stream.astype(np.float64)
        dot = signal.oaconvolve(x, self._pat_rev, mode="valid")
        csum = np.cumsum(stream, dtype=np.int64)
        win = csum[n - 1 :].copy()
        win[1:] -= csum[:-n]
        corr = n - self._pat_ones - win + 2 * np.rint(dot).astype(np.int64)
        return corr.astype(np.int32)


def scan_correlation(stream, pattern, backend: str | None = None) -> np.ndarray:
    """One-shot sliding correlation of ``stream`` against ``pattern``."""
    return CorrelationScanner(pattern, backend=backend).scan(stream)
