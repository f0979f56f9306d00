"""Command-line surface: sync-word generation, stream generation, the
Monte Carlo experiment and file-based detection.

Every subcommand echoes its fully resolved configuration (seeds included)
to stdout before doing any work, and writes output files atomically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .bits import gen_sync_word, make_params, pack_bits, unpack_bits
from .channel import StreamSpec, build_stream, write_sidecar
from .detector import detect
from .harness import run_experiment, write_csv, emit_plot
from .hw_model import SyncMachine


def _atomic_write(path: str, data: bytes) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _parse_snr_list(text: str) -> list[int]:
    """'A:B' for an inclusive integer range, or comma-separated values."""
    text = text.strip()
    if ":" in text:
        lo_s, hi_s = text.split(":", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            lo, hi = hi, lo
        return list(range(lo, hi + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_gap(text: str) -> int | tuple[int, int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (int(lo), int(hi))
    return int(text)


def _echo_config(args: argparse.Namespace) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    print("config:", json.dumps(cfg, default=str, sort_keys=True))


def _apply_config_file(args: argparse.Namespace) -> None:
    """Values from --config (a JSON object) override the parsed flags."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        overrides = json.load(fh)
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValueError(f"unknown config key: {key}")
        setattr(args, attr, value)


def _cmd_gen_sync(args) -> int:
    if args.n < 1:
        raise ValueError(f"--n must be >= 1, got {args.n}")
    word = gen_sync_word(args.n, args.seed)
    _atomic_write(args.out, pack_bits(word))
    print(f"wrote {args.out}: {args.n} bits ({(args.n + 7) // 8} bytes)")
    return 0


def _cmd_gen_stream(args) -> int:
    params = make_params(args.n, args.q, args.k, theta=args.n)  # theta unused here
    sync = gen_sync_word(args.n, args.seed)
    spec = StreamSpec(num_frames=args.frames, idle_gap=args.gap, seed=args.seed)
    stream, records = build_stream(spec, sync, params)
    _atomic_write(args.out, pack_bits(stream))
    sidecar = args.sidecar or f"{args.out}.truth"
    write_sidecar(sidecar, records)
    print(f"wrote {args.out}: {stream.size} bits, {len(records)} frames; truth in {sidecar}")
    return 0


def resolve_theta(n: int, theta: int | None, theta_frac: float) -> int:
    """Absolute threshold wins; otherwise round the fraction of n."""
    return theta if theta is not None else round(theta_frac * n)


def _cmd_emulate(args) -> int:
    theta = resolve_theta(args.n, args.theta, args.theta_frac)
    params = make_params(args.n, args.q, args.k, theta)
    spec = StreamSpec(num_frames=args.frames, idle_gap=args.gap, seed=args.seed)
    snrs = (
        [int(s) for s in args.snr_list]
        if isinstance(args.snr_list, (list, tuple))
        else _parse_snr_list(args.snr_list)
    )
    results = run_experiment(
        params,
        spec,
        snrs,
        args.seed,
        chunk_frames=args.chunk_frames,
        crosscheck=args.crosscheck,
        threads=args.threads,
    )
    write_csv(results, args.out)
    if args.plot:
        emit_plot(results, args.plot)
    for r in results:
        print(
            f"snr={r.snr_db:+d} dB: {r.frames_lost}/{r.frames_sent} lost "
            f"(rate {r.fsync_error_rate:.3e}), ber {r.ber_measured:.4f} "
            f"[model {r.ber_model:.4f}] in {r.elapsed:.1f}s"
        )
    print(f"wrote {args.out}" + (f" and {args.plot}" if args.plot else ""))
    return 0


def _cmd_detect(args) -> int:
    params = make_params(args.n, args.q, args.k, args.theta)
    with open(args.sync, "rb") as fh:
        sync = unpack_bits(fh.read(), args.n)
    with open(args.stream, "rb") as fh:
        raw = fh.read()
    stream = unpack_bits(raw, 8 * len(raw))
    if stream.size < args.n:
        raise ValueError(f"stream of {stream.size} bits is shorter than the sync word")
    if args.cycle_model:
        events = SyncMachine(params, sync).run(stream)
    else:
        events = detect(stream, params, sync)
    lines = [f"{e.position} {e.sum} {pack_bits(e.payload).hex()}" for e in events]
    _atomic_write(args.out, ("".join(line + "\n" for line in lines)).encode())
    print(f"wrote {args.out}: {len(events)} events")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="framesync",
        description="Sync-word frame synchronization toolkit",
    )
    p.add_argument("--version", action="version", version=f"framesync {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    gs = sub.add_parser("gen-sync", help="generate a packed sync word file")
    gs.add_argument("--n", type=int, required=True, help="sync word length in bits")
    gs.add_argument("--seed", type=int, required=True)
    gs.add_argument("--out", required=True)
    gs.add_argument("--config", help="JSON file overriding flags")
    gs.set_defaults(func=_cmd_gen_sync)

    gt = sub.add_parser("gen-stream", help="generate a packed noiseless stream + truth sidecar")
    gt.add_argument("--n", type=int, required=True)
    gt.add_argument("--q", type=int, required=True)
    gt.add_argument("--k", type=int, default=300, help="payload blocks per frame")
    gt.add_argument("--frames", type=int, required=True)
    gt.add_argument("--gap", type=_parse_gap, default=None, help="idle gap bits: FIXED or LO:HI")
    gt.add_argument("--seed", type=int, required=True)
    gt.add_argument("--out", required=True)
    gt.add_argument("--sidecar", help="truth file path (default: OUT.truth)")
    gt.add_argument("--config", help="JSON file overriding flags")
    gt.set_defaults(func=_cmd_gen_stream)

    em = sub.add_parser("emulate", help="run the Monte Carlo error-rate experiment")
    em.add_argument("--n", type=int, required=True)
    em.add_argument("--q", type=int, required=True)
    em.add_argument("--k", type=int, default=300)
    em.add_argument("--theta", type=int, default=None, help="absolute threshold")
    em.add_argument("--theta-frac", type=float, default=0.65, help="threshold as fraction of n")
    em.add_argument("--frames", type=int, default=20000)
    em.add_argument("--snr-list", default="-8:-2", help="A:B inclusive range or comma list")
    em.add_argument("--seed", type=int, required=True)
    em.add_argument("--out", required=True, help="CSV output path")
    em.add_argument("--plot", help="SVG plot output path")
    em.add_argument("--crosscheck", type=float, default=0.01,
                    help="fraction of chunks re-verified with the cycle model")
    em.add_argument("--threads", type=int, default=1)
    em.add_argument("--chunk-frames", type=int, default=200)
    em.add_argument("--gap", type=_parse_gap, default=None)
    em.add_argument("--config", help="JSON file overriding flags")
    em.set_defaults(func=_cmd_emulate)

    dt = sub.add_parser("detect", help="run the detector over a packed stream file")
    dt.add_argument("--n", type=int, required=True)
    dt.add_argument("--q", type=int, required=True)
    dt.add_argument("--k", type=int, required=True)
    dt.add_argument("--theta", type=int, required=True)
    dt.add_argument("--sync", required=True, help="packed sync word file")
    dt.add_argument("--stream", required=True, help="packed stream file")
    dt.add_argument("--out", required=True, help="events output file")
    dt.add_argument("--cycle-model", action="store_true",
                    help="use the cycle-accurate machine instead of the functional detector")
    dt.add_argument("--config", help="JSON file overriding flags")
    dt.set_defaults(func=_cmd_detect)
    return p


def _merge_negative_values(argv: list[str]) -> list[str]:
    """Join ``--snr-list -8:-2`` into ``--snr-list=-8:-2`` so argparse does
    not mistake the leading-dash value for an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--snr-list" and i + 1 < len(argv):
            out.append(f"--snr-list={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_merge_negative_values(list(argv)))
    try:
        _apply_config_file(args)
        _echo_config(args)
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
