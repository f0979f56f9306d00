"""framesync: sync-word frame synchronization toolkit.

A bit-exact software model of a parallel sync-word correlation detector
(isolation window, pipelined correlation, frame capture), an equivalent
functional detector used as the fast path and oracle, a Gray-16QAM/AWGN
link simulation, and a Monte Carlo harness measuring frame-synchronization
error rates versus SNR.
"""

__version__ = "0.1.0"

from .bits import (
    SyncParams,
    as_bits,
    complement,
    correlate,
    gen_sync_word,
    make_params,
    pack_bits,
    unpack_bits,
)
from .kernels import BACKEND, HAVE_NUMBA, CorrelationScanner, scan_correlation
from .hw_model import (
    CorrelationOutput,
    CycleOutput,
    SyncMachine,
    correlate_window,
    latency,
    output_position,
    run,
    select_max,
    window_shift,
)
from .detector import (
    DetectionEvent,
    StreamScanner,
    detect,
    miss_probability_model,
    scan_positions,
)
from .channel import (
    ChannelConfig,
    FrameRecord,
    StreamSpec,
    add_awgn,
    ber_closed_form,
    build_stream,
    demap_hard,
    map_16qam,
    measure_ber,
    noise_sigma,
    read_sidecar,
    write_sidecar,
)
from .harness import (
    TrialResult,
    emit_plot,
    frame_outcome,
    read_csv,
    run_experiment,
    write_csv,
)

__all__ = [
    "SyncParams",
    "as_bits",
    "complement",
    "correlate",
    "gen_sync_word",
    "make_params",
    "pack_bits",
    "unpack_bits",
    "BACKEND",
    "HAVE_NUMBA",
    "CorrelationScanner",
    "scan_correlation",
    "CorrelationOutput",
    "CycleOutput",
    "SyncMachine",
    "correlate_window",
    "latency",
    "output_position",
    "run",
    "select_max",
    "window_shift",
    "DetectionEvent",
    "StreamScanner",
    "detect",
    "miss_probability_model",
    "scan_positions",
    "ChannelConfig",
    "FrameRecord",
    "StreamSpec",
    "add_awgn",
    "ber_closed_form",
    "build_stream",
    "demap_hard",
    "map_16qam",
    "measure_ber",
    "noise_sigma",
    "read_sidecar",
    "write_sidecar",
    "TrialResult",
    "emit_plot",
    "frame_outcome",
    "read_csv",
    "run_experiment",
    "write_csv",
]
