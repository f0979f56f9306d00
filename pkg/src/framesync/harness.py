"""Monte Carlo driver for the frame-synchronization error-rate experiment.

For each SNR point: generate frames with random payloads and idle gaps,
modulate the whole stream with 16QAM, corrupt with AWGN, hard-demodulate,
run the detector over the received bits and count how many frames were not
captured at exactly their true start position.

Frames are processed in chunks to bound memory. Every random draw (gap,
payload, noise) comes from a generator derived from
(master_seed, snr, frame index), so results are bit-identical regardless of
chunk size or thread count. Detection is the streaming functional scanner;
the cycle-accurate model is run on a deterministic subsample of chunks and
must produce identical events (the production-scale cross-check of the two
implementations).
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bits import SyncParams, gen_sync_word
from .channel import (
    StreamSpec,
    ber_closed_form,
    derive_rng,
    frame_unit,
    resolve_gap,
    transmit_bits,
)
from .detector import StreamScanner, detect
from .hw_model import SyncMachine


class CrosscheckError(AssertionError):
    """The cycle model and the functional detector disagreed on a chunk."""


@dataclass
class TrialResult:
    """One SNR point's outcome."""

    snr_db: float
    frames_sent: int
    frames_lost: int
    fsync_error_rate: float
    ber_measured: float
    ber_model: float
    elapsed: float
    label: str = ""


CSV_COLUMNS = ["snr_db", "frames", "losses", "fsync_error_rate", "ber_measured", "ber_model"]


def frame_outcome(event_positions, true_starts) -> np.ndarray:
    """Per-frame success flags: a frame succeeds iff some event sits exactly
    at its true start. Misses, misaligned detections and frames swallowed by
    an earlier capture all count as losses."""
    hits = set(int(p) for p in event_positions)
    return np.array([int(t) in hits for t in true_starts], dtype=bool)


def _snr_code(snr_db: float) -> int:
    return round(float(snr_db) * 1000)


def _crosscheck_chunks(nchunks: int, fraction: float) -> set[int]:
    """Deterministic chunk subsample: the first chunk plus every chunk that
    advances floor(c * fraction)."""
    if fraction <= 0 or nchunks == 0:
        return set()
    picked = {0}
    for c in range(1, nchunks):
        if math.floor((c + 1) * fraction) > math.floor(c * fraction):
            picked.add(c)
    return picked


def _run_one_snr(
    params: SyncParams,
    spec: StreamSpec,
    snr_db: float,
    master_seed: int,
    sync: np.ndarray,
    chunk_frames: int,
    crosscheck: float,
    backend,
    label: str,
) -> TrialResult:
    t0 = time.perf_counter()
    gap_range = resolve_gap(spec.idle_gap, params.q)
    scanner = StreamScanner(params, sync, backend=backend)
    code = _snr_code(snr_db)

    nchunks = -(-spec.num_frames // chunk_frames)
    checked = _crosscheck_chunks(nchunks, crosscheck)

    true_starts: list[int] = []
    hits: list[tuple[int, int]] = []
    bit_errors = 0
    bits_total = 0
    cursor = 0

    for c in range(nchunks):
        lo = c * chunk_frames
        hi = min(lo + chunk_frames, spec.num_frames)
        tx_parts = []
        rx_parts = []
        for f in range(lo, hi):
            rng = derive_rng(master_seed, code, f)
            bits, gap, _payload = frame_unit(params, sync, rng, gap_range)
            true_starts.append(cursor + gap)
            cursor += bits.size
            tx_parts.append(bits)
            rx_parts.append(transmit_bits(bits, snr_db, rng))
        tx = np.concatenate(tx_parts)
        rx = np.concatenate(rx_parts)
        bit_errors += int(np.count_nonzero(tx != rx))
        bits_total += tx.size
        hits += scanner.feed(rx)
        if c in checked:
            _crosscheck_chunk(params, sync, rx, backend)
    hits += scanner.finish()

    ok = frame_outcome([p for p, _ in hits], true_starts)
    losses = int(np.count_nonzero(~ok))
    return TrialResult(
        snr_db=snr_db,
        frames_sent=spec.num_frames,
        frames_lost=losses,
        fsync_error_rate=losses / spec.num_frames,
        ber_measured=bit_errors / bits_total if bits_total else 0.0,
        ber_model=ber_closed_form(snr_db),
        elapsed=time.perf_counter() - t0,
        label=label,
    )


def _crosscheck_chunk(params, sync, rx_bits, backend) -> None:
    ref = detect(rx_bits, params, sync, backend=backend)
    hw = SyncMachine(params, sync).run(rx_bits)
    if ref != hw:
        raise CrosscheckError(
            f"cycle model and functional detector diverged on a {rx_bits.size}-bit "
            f"chunk: {len(hw)} vs {len(ref)} events"
        )


def run_experiment(
    params: SyncParams,
    spec: StreamSpec,
    snr_list,
    master_seed: int,
    *,
    chunk_frames: int = 200,
    crosscheck: float = 0.01,
    threads: int = 1,
    backend: str | None = None,
    label: str = "",
) -> list[TrialResult]:
    """Run the error-rate experiment at every SNR in ``snr_list``.

    The sync word is generated from ``master_seed`` and shared across SNR
    points (one word per architecture version, as in a real link). SNR
    points are independent and may run on ``threads`` workers; the output is
    identical for any thread count and chunk size.
    """
    if spec.num_frames < 1:
        raise ValueError("need at least one frame")
    if chunk_frames < 1:
        raise ValueError("chunk_frames must be >= 1")
    sync = gen_sync_word(params.n, master_seed)
    label = label or f"({params.n},{params.q})"

    def job(snr):
        return _run_one_snr(
            params, spec, snr, master_seed, sync, chunk_frames, crosscheck, backend, label
        )

    snrs = list(snr_list)
    if threads > 1 and len(snrs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(job, snrs))
    return [job(snr) for snr in snrs]


def write_csv(results: list[TrialResult], path) -> None:
    """Write results in the fixed schema: snr_db, frames, losses,
    fsync_error_rate, ber_measured, ber_model. Atomic (temp + rename)."""
    if not results:
        raise ValueError("no results to write")
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in results:
            fh.write(
                f"{r.snr_db},{r.frames_sent},{r.frames_lost},"
                f"{r.fsync_error_rate!r},{r.ber_measured!r},{r.ber_model!r}\n"
            )
    os.replace(tmp, path)


def read_csv(path) -> list[dict]:
    """Parse a results CSV back into dicts with numeric values."""
    out = []
    with open(path) as fh:
        for row in csv.DictReader(fh):
            out.append(
                {
                    "snr_db": float(row["snr_db"]),
                    "frames": int(row["frames"]),
                    "losses": int(row["losses"]),
                    "fsync_error_rate": float(row["fsync_error_rate"]),
                    "ber_measured": float(row["ber_measured"]),
                    "ber_model": float(row["ber_model"]),
                }
            )
    return out


def make_figure(results: list[TrialResult]):
    """Error-rate-vs-SNR figure: one curve per label plus the channel BER
    curve, log-scaled y. Zero rates are left off the log plot."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not results:
        raise ValueError("no results to plot")
    fig, ax = plt.subplots(figsize=(7, 5))
    labels = []
    for r in results:
        if r.label not in labels:
            labels.append(r.label)
    for label in labels:
        pts = sorted((r for r in results if r.label == label), key=lambda r: r.snr_db)
        xs = [r.snr_db for r in pts if r.fsync_error_rate > 0]
        ys = [r.fsync_error_rate for r in pts if r.fsync_error_rate > 0]
        ax.plot(xs, ys, marker="o", label=label)
    snrs = sorted({r.snr_db for r in results})
    ax.plot(snrs, [ber_closed_form(s) for s in snrs], marker="s", linestyle="--", label="BER")
    ax.set_yscale("log")
    ax.set_xlabel("SNR (dB, Eb/N0)")
    ax.set_ylabel("frame synchronization error rate")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def emit_plot(results: list[TrialResult], path) -> None:
    """Render :func:`make_figure` to a self-contained vector file (SVG/PDF
    by extension)."""
    fig = make_figure(results)
    name = str(path)
    ext = os.path.splitext(name)[1].lstrip(".") or "svg"
    tmp = f"{name}.tmp"
    fig.savefig(tmp, format=ext)
    import matplotlib.pyplot as plt

    plt.close(fig)
    os.replace(tmp, path)
