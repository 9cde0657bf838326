"""Alignment quality metric between canonical and warped parameter streams."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch
from .vocoder import ENVELOPE_FLOOR, VocoderParams

DEFAULT_F_LIMIT = 6000.0


@dataclass(frozen=True)
class DistanceTrajectory:
    frame_times: np.ndarray
    per_frame: np.ndarray  # dB, >= 0
    mean: float


def alignment_distance(canonical: VocoderParams, warped: VocoderParams,
                       f_limit: float = DEFAULT_F_LIMIT) -> DistanceTrajectory:
    """Per-frame RMS log-spectral distance (dB) on envelope bins below f_limit."""
    if canonical.frame_count != warped.frame_count:
        raise GridMismatch(
            f"frame counts differ: {canonical.frame_count} vs {warped.frame_count}"
        )
    if (canonical.sample_rate != warped.sample_rate
            or canonical.fft_size != warped.fft_size
            or canonical.frame_period != warped.frame_period):
        raise GridMismatch("sampling metadata differs between the two streams")
    f_limit = min(f_limit, canonical.nyquist)
    bin_freqs = np.arange(canonical.n_bins) * (canonical.sample_rate / canonical.fft_size)
    mask = bin_freqs < f_limit
    if not np.any(mask):
        raise GridMismatch(f"no spectral bins below f_limit={f_limit}")
    db_c = 10.0 * np.log10(np.maximum(canonical.envelope[:, mask], ENVELOPE_FLOOR))
    db_w = 10.0 * np.log10(np.maximum(warped.envelope[:, mask], ENVELOPE_FLOOR))
    per_frame = np.sqrt(np.mean((db_c - db_w) ** 2, axis=1))
    return DistanceTrajectory(
        frame_times=canonical.frame_times,
        per_frame=per_frame,
        mean=float(np.mean(per_frame)),
    )
