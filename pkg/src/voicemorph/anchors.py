"""Piecewise-linear time/frequency warps defined by user-placed anchors.

An AnchorSet relates the fixed "canonical" axis to an instance's own
"non-linear" axis. Temporal anchors form columns; each column may carry
frequency anchor pairs. Warps pass through virtual boundary points (utterance
ends, 0 Hz and Nyquist), which are never stored.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidAnchors, OutOfRange
from .vocoder import VocoderParams

_T_EPS = 1e-9


@dataclass(frozen=True)
class FrequencyAnchorPair:
    f_canonical: float
    f_instance: float


@dataclass(frozen=True)
class AnchorColumn:
    t_canonical: float
    t_instance: float
    freq_anchors: tuple[FrequencyAnchorPair, ...] = ()


@dataclass(frozen=True)
class AnchorSet:
    columns: tuple[AnchorColumn, ...]
    duration_canonical: float
    duration_instance: float
    nyquist: float

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        self.validate()

    def validate(self) -> None:
        if self.duration_canonical <= 0 or self.duration_instance <= 0:
            raise InvalidAnchors("durations must be positive")
        if self.nyquist <= 0:
            raise InvalidAnchors("nyquist must be positive")
        prev_tc, prev_ti = 0.0, 0.0
        for col in self.columns:
            if not (prev_tc < col.t_canonical < self.duration_canonical + _T_EPS):
                raise InvalidAnchors(
                    f"temporal anchors must be strictly increasing within "
                    f"(0, {self.duration_canonical}); got {col.t_canonical}"
                )
            if not (prev_ti < col.t_instance < self.duration_instance + _T_EPS):
                raise InvalidAnchors(
                    f"instance-side anchors must be strictly increasing within "
                    f"(0, {self.duration_instance}); got {col.t_instance}"
                )
            prev_tc, prev_ti = col.t_canonical, col.t_instance
            prev_fc, prev_fi = 0.0, 0.0
            for pair in col.freq_anchors:
                if not (prev_fc < pair.f_canonical < self.nyquist):
                    raise InvalidAnchors(
                        f"frequency anchors must be strictly increasing within "
                        f"(0, {self.nyquist}); got {pair.f_canonical}"
                    )
                if not (prev_fi < pair.f_instance < self.nyquist):
                    raise InvalidAnchors(
                        f"instance-side frequency anchors must be strictly "
                        f"increasing within (0, {self.nyquist}); got {pair.f_instance}"
                    )
                prev_fc, prev_fi = pair.f_canonical, pair.f_instance

    @property
    def is_identity(self) -> bool:
        return not self.columns and self.duration_canonical == self.duration_instance

    def time_breakpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """(canonical, instance) anchor times including virtual boundaries."""
        tc = np.array([0.0, *(c.t_canonical for c in self.columns), self.duration_canonical])
        ti = np.array([0.0, *(c.t_instance for c in self.columns), self.duration_instance])
        return tc, ti


def identity_anchors(params: VocoderParams) -> AnchorSet:
    return AnchorSet(
        columns=(),
        duration_canonical=params.duration,
        duration_instance=params.duration,
        nyquist=params.nyquist,
    )


@dataclass(frozen=True)
class MorphInstance:
    params: VocoderParams
    anchors: AnchorSet
    label: str = ""

    def __post_init__(self):
        if abs(self.anchors.duration_instance - self.params.duration) > 1e-6:
            raise InvalidAnchors(
                f"anchor duration_instance {self.anchors.duration_instance} does "
                f"not match parameter span {self.params.duration}"
            )
        if abs(self.anchors.nyquist - self.params.nyquist) > 1e-6:
            raise InvalidAnchors("anchor nyquist does not match parameter nyquist")


def warp_time(a: AnchorSet, t_canonical: float) -> float:
    """Map canonical time to instance time through the piecewise-linear warp."""
    if not (-_T_EPS <= t_canonical <= a.duration_canonical + _T_EPS):
        raise OutOfRange(
            f"t={t_canonical} outside [0, {a.duration_canonical}]"
        )
    tc, ti = a.time_breakpoints()
    return float(np.interp(np.clip(t_canonical, 0.0, a.duration_canonical), tc, ti))


def frequency_pairs_at(a: AnchorSet, t_canonical: float) -> tuple[FrequencyAnchorPair, ...]:
    """Frequency anchor pairs in effect at a canonical time.

    At a column time the column's pairs apply verbatim; between two columns with
    equal pair counts the pair coordinates interpolate linearly in time;
    otherwise the nearer column's pairs apply. Outside the outermost columns the
    nearest column's pairs hold.
    """
    if not (-_T_EPS <= t_canonical <= a.duration_canonical + _T_EPS):
        raise OutOfRange(f"t={t_canonical} outside [0, {a.duration_canonical}]")
    cols = a.columns
    if not cols:
        return ()
    times = [c.t_canonical for c in cols]
    if t_canonical <= times[0]:
        return cols[0].freq_anchors
    if t_canonical >= times[-1]:
        return cols[-1].freq_anchors
    hi = int(np.searchsorted(times, t_canonical))
    lo = hi - 1
    left, right = cols[lo], cols[hi]
    if abs(t_canonical - left.t_canonical) < _T_EPS:
        return left.freq_anchors
    if abs(t_canonical - right.t_canonical) < _T_EPS:
        return right.freq_anchors
    u = (t_canonical - left.t_canonical) / (right.t_canonical - left.t_canonical)
    if len(left.freq_anchors) == len(right.freq_anchors):
        return tuple(
            FrequencyAnchorPair(
                f_canonical=(1 - u) * pl.f_canonical + u * pr.f_canonical,
                f_instance=(1 - u) * pl.f_instance + u * pr.f_instance,
            )
            for pl, pr in zip(left.freq_anchors, right.freq_anchors)
        )
    return left.freq_anchors if u <= 0.5 else right.freq_anchors


def _freq_breakpoints(pairs, nyquist: float) -> tuple[np.ndarray, np.ndarray]:
    fc = np.array([0.0, *(p.f_canonical for p in pairs), nyquist])
    fi = np.array([0.0, *(p.f_instance for p in pairs), nyquist])
    if np.any(np.diff(fc) <= 0) or np.any(np.diff(fi) <= 0):
        raise InvalidAnchors("frequency anchor pairs must be strictly increasing")
    return fc, fi


def warp_frequency(pairs, nyquist: float, f_canonical) -> float | np.ndarray:
    """Map canonical frequency to instance frequency; accepts scalars or arrays."""
    f = np.asarray(f_canonical, dtype=np.float64)
    if np.any(f < -1e-9) or np.any(f > nyquist + 1e-9):
        raise OutOfRange(f"frequency outside [0, {nyquist}]")
    fc, fi = _freq_breakpoints(pairs, nyquist)
    out = np.interp(np.clip(f, 0.0, nyquist), fc, fi)
    return float(out) if np.isscalar(f_canonical) else out


def _interp_frames(params: VocoderParams, t_instance: np.ndarray):
    """Sample parameter streams at arbitrary instance times.

    Envelope/aperiodicity interpolate linearly between frames; fo interpolates
    in the log domain when both neighbors are voiced, otherwise the nearer
    frame's fo and voicing apply.
    """
    pos = np.clip(t_instance / params.frame_period, 0.0, params.frame_count - 1)
    snapped = np.round(pos)
    pos = np.where(np.abs(pos - snapped) < 1e-9, snapped, pos)
    i0 = np.floor(pos).astype(np.int64)
    i1 = np.minimum(i0 + 1, params.frame_count - 1)
    frac = pos - i0

    env = (1 - frac)[:, None] * params.envelope[i0] + frac[:, None] * params.envelope[i1]
    ap = (1 - frac)[:, None] * params.aperiodicity[i0] + frac[:, None] * params.aperiodicity[i1]

    fo0, fo1 = params.fo[i0], params.fo[i1]
    nearest = np.where(frac < 0.5, fo0, fo1)
    both_voiced = (fo0 > 0) & (fo1 > 0)
    with np.errstate(divide="ignore"):
        logint = np.exp((1 - frac) * np.log(np.maximum(fo0, 1e-300))
                        + frac * np.log(np.maximum(fo1, 1e-300)))
    fo = np.where(both_voiced, logint, nearest)
    fo = np.where(frac == 0.0, fo0, fo)  # exact on-grid hits stay bit-identical
    return fo, env, ap


def resample_to_canonical(inst: MorphInstance,
                          canonical_frame_times: np.ndarray) -> VocoderParams:
    """Re-grid an instance onto canonical frame times through its warps."""
    times = np.asarray(canonical_frame_times, dtype=np.float64)
    a = inst.anchors
    tc, ti = a.time_breakpoints()
    if np.any(times < -_T_EPS) or np.any(times > a.duration_canonical + _T_EPS):
        raise OutOfRange("canonical frame time outside the canonical duration")
    t_inst = np.interp(np.clip(times, 0.0, a.duration_canonical), tc, ti)
    fo, env, ap = _interp_frames(inst.params, t_inst)

    p = inst.params
    bin_freqs = np.arange(p.n_bins) * (p.sample_rate / p.fft_size)
    out_env = np.empty_like(env)
    out_ap = np.empty_like(ap)
    for i, t in enumerate(times):
        pairs = frequency_pairs_at(a, float(np.clip(t, 0.0, a.duration_canonical)))
        if pairs:
            f_inst = warp_frequency(pairs, a.nyquist, bin_freqs)
            out_env[i] = np.interp(f_inst, bin_freqs, env[i])
            out_ap[i] = np.interp(f_inst, bin_freqs, ap[i])
        else:
            out_env[i] = env[i]
            out_ap[i] = ap[i]
    return VocoderParams(
        sample_rate=p.sample_rate,
        frame_period=p.frame_period,
        fft_size=p.fft_size,
        fo=fo,
        envelope=np.maximum(out_env, 1e-12),
        aperiodicity=np.clip(out_ap, 1e-6, 1.0),
    )
