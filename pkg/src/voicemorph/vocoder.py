"""Classical vocoder analysis and synthesis.

Analysis decomposes a waveform into three frame-indexed streams: fundamental
frequency (0.0 marks unvoiced frames), a smoothed power-spectrum envelope, and
per-bin aperiodicity (noise-to-total power ratio). Synthesis runs the inverse:
mixed pulse/noise excitation filtered by the minimum-phase response of the
envelope, overlap-added frame by frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal.windows import hann

from .audio import Waveform, MIN_SAMPLE_RATE
from .errors import InvalidInput, InvalidParams, UnsupportedRate

ENVELOPE_FLOOR = 1e-12
AP_FLOOR = 1e-6
YIN_THRESHOLD = 0.15
N_AP_BANDS = 8


def next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


@dataclass(frozen=True)
class AnalysisConfig:
    frame_period: float = 0.005
    fo_floor: float = 60.0
    fo_ceil: float = 600.0
    fft_size: int | None = None  # derived from sample rate when None

    def validate(self, sample_rate: int) -> None:
        if self.frame_period <= 0:
            raise InvalidInput("frame_period must be positive")
        if not (0 < self.fo_floor < self.fo_ceil < sample_rate / 2):
            raise InvalidInput(
                f"need 0 < fo_floor < fo_ceil < nyquist, got "
                f"({self.fo_floor}, {self.fo_ceil}) at {sample_rate} Hz"
            )
        if self.fft_size is not None and (self.fft_size <= 0 or self.fft_size % 2):
            raise InvalidInput("fft_size must be a positive even integer")

    def resolved_fft_size(self, sample_rate: int) -> int:
        if self.fft_size is not None:
            return self.fft_size
        return next_pow2(math.ceil(3.0 * sample_rate / self.fo_floor))


@dataclass(frozen=True)
class VocoderParams:
    """Frame-indexed vocoder parameter streams on a uniform time grid."""

    sample_rate: int
    frame_period: float
    fft_size: int
    fo: np.ndarray           # (frames,), Hz; 0.0 = unvoiced
    envelope: np.ndarray     # (frames, fft_size//2 + 1), linear power > 0
    aperiodicity: np.ndarray  # (frames, fft_size//2 + 1), in [AP_FLOOR, 1]

    def __post_init__(self):
        object.__setattr__(self, "fo", np.asarray(self.fo, dtype=np.float64))
        object.__setattr__(self, "envelope", np.asarray(self.envelope, dtype=np.float64))
        object.__setattr__(self, "aperiodicity", np.asarray(self.aperiodicity, dtype=np.float64))

    @property
    def frame_count(self) -> int:
        return self.fo.shape[0]

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    @property
    def nyquist(self) -> float:
        return self.sample_rate / 2.0

    @property
    def duration(self) -> float:
        """Time span covered by the frame grid (first to last frame)."""
        return max(self.frame_count - 1, 0) * self.frame_period

    @property
    def frame_times(self) -> np.ndarray:
        return np.arange(self.frame_count) * self.frame_period

    def validate(self) -> None:
        nb = self.n_bins
        if self.sample_rate <= 0 or self.frame_period <= 0:
            raise InvalidParams("sample_rate and frame_period must be positive")
        if self.fft_size <= 0 or self.fft_size % 2:
            raise InvalidParams("fft_size must be a positive even integer")
        if self.fo.ndim != 1:
            raise InvalidParams("fo must be one-dimensional")
        frames = self.fo.shape[0]
        if frames == 0:
            raise InvalidParams("parameter streams contain zero frames")
        if self.envelope.shape != (frames, nb) or self.aperiodicity.shape != (frames, nb):
            raise InvalidParams(
                f"envelope/aperiodicity shapes {self.envelope.shape}/"
                f"{self.aperiodicity.shape} do not match ({frames}, {nb})"
            )
        for name, arr in (("fo", self.fo), ("envelope", self.envelope),
                          ("aperiodicity", self.aperiodicity)):
            if not np.all(np.isfinite(arr)):
                raise InvalidParams(f"{name} contains non-finite values")
        if np.any(self.fo < 0):
            raise InvalidParams("fo values must be non-negative")
        if np.any(self.envelope <= 0):
            raise InvalidParams("envelope values must be strictly positive")
        if np.any(self.aperiodicity < AP_FLOOR) or np.any(self.aperiodicity > 1.0):
            raise InvalidParams(f"aperiodicity must lie in [{AP_FLOOR}, 1]")


def _frame_matrix(x: np.ndarray, centers: np.ndarray, length: int) -> np.ndarray:
    """Extract zero-padded segments of `length` centered on each sample index."""
    half = length // 2
    padded = np.concatenate([np.zeros(half), x, np.zeros(length)])
    idx = centers[:, None] + np.arange(length)[None, :]
    return padded[idx]


def _yin_track(frames: np.ndarray, sample_rate: int, cfg: AnalysisConfig) -> np.ndarray:
    """Per-frame F0 estimates (0.0 = unvoiced) from windowed signal segments."""
    n_frames, wlen = frames.shape
    tau_max = min(int(math.ceil(sample_rate / cfg.fo_floor)), wlen // 2)
    tau_min = max(2, int(sample_rate / cfg.fo_ceil))
    w_int = wlen - tau_max
    size = next_pow2(wlen + tau_max)

    # light smoothing spreads impulsive excitation across neighboring lags,
    # otherwise non-integer periods alias to octave-down dips
    kernel = np.array([0.25, 0.5, 0.25])
    frames = np.apply_along_axis(np.convolve, 1, frames, kernel, "same")

    spec_full = np.fft.rfft(frames, size, axis=1)
    spec_head = np.fft.rfft(frames[:, :w_int], size, axis=1)
    corr = np.fft.irfft(spec_full * np.conj(spec_head), size, axis=1)[:, : tau_max + 1]

    csum = np.cumsum(frames**2, axis=1)
    e0 = csum[:, w_int - 1][:, None]
    taus = np.arange(1, tau_max + 1)
    e_tau = csum[:, taus + w_int - 1] - csum[:, taus - 1]
    diff = np.maximum(e0 + e_tau - 2.0 * corr[:, 1:], 0.0)

    denom = np.cumsum(diff, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cmnd = np.where(denom > 0, diff * taus[None, :] / denom, 1.0)

    fo = np.zeros(n_frames)
    lo = tau_min - 1  # cmnd column index of lag tau_min
    for i in range(n_frames):
        row = cmnd[i]
        below = np.nonzero(row[lo:] < YIN_THRESHOLD)[0]
        if below.size:
            t = lo + below[0]
            while t + 1 < row.size and row[t + 1] < row[t]:
                t += 1
        else:
            t = lo + int(np.argmin(row[lo:]))
        if row[t] >= YIN_THRESHOLD:
            continue
        tau = float(t + 1)
        if 0 < t < row.size - 1:  # parabolic refinement on the dip
            a, b, c = row[t - 1], row[t], row[t + 1]
            denom2 = a - 2 * b + c
            if denom2 > 0:
                tau += 0.5 * (a - c) / denom2
        f = sample_rate / tau
        if cfg.fo_floor <= f <= cfg.fo_ceil:
            fo[i] = f
    return fo


def _smooth_envelope(power: np.ndarray, fo: np.ndarray, fft_size: int,
                     sample_rate: int, fo_floor: float) -> np.ndarray:
    """Cepstral liftering of log power spectra; removes harmonic fine structure.

    The cutoff quefrency follows each frame's pitch (half the period) so the
    rahmonic of high-pitched frames is removed too; unvoiced frames fall back
    to the floor-pitch cutoff.
    """
    log_p = np.log(np.maximum(power, ENVELOPE_FLOOR))
    ceps = np.fft.irfft(log_p, fft_size, axis=1)
    base = sample_rate / (2.0 * fo_floor)
    with np.errstate(divide="ignore"):
        cut = np.where(fo > 0, np.minimum(base, sample_rate / (2.0 * np.maximum(fo, 1e-9))), base)
    cut = np.minimum(np.round(cut).astype(np.int64), fft_size // 2 - 1)
    q = np.arange(fft_size)
    q_sym = np.minimum(q, fft_size - q)
    lifter = q_sym[None, :] <= cut[:, None]
    smooth = np.fft.rfft(ceps * lifter, fft_size, axis=1).real
    return np.maximum(np.exp(smooth), ENVELOPE_FLOOR)


def _band_aperiodicity(power: np.ndarray, fo: np.ndarray, fft_size: int,
                       sample_rate: int, fo_floor: float) -> np.ndarray:
    """Noise-to-total power ratio per frame and bin.

    Per log-spaced band, periodicity is the normalized band-limited
    autocorrelation of the power spectrum at the pitch period; the residual of
    the optimal one-period predictor gives the aperiodic fraction 1 - c^2.

    The noise level is read off between the harmonics: bins near odd
    half-multiples of fo carry only the noise floor (plus window leakage),
    while the band mean carries harmonics and noise together, so their ratio
    is the aperiodic fraction directly.
    """
    n_frames, nb = power.shape
    nyq = sample_rate / 2.0
    bin_hz = sample_rate / fft_size
    freqs = np.arange(nb) * bin_hz
    edges = np.geomspace(fo_floor, nyq, N_AP_BANDS + 1)
    centers = np.sqrt(edges[:-1] * edges[1:])

    ap = np.ones((n_frames, nb))
    voiced = np.nonzero(fo > 0)[0]
    if voiced.size == 0:
        return ap
    band_masks = [
        (freqs >= edges[b]) & (freqs < edges[b + 1]) for b in range(N_AP_BANDS)
    ]
    for i in voiced:
        f0 = fo[i]
        # distance from each bin to the nearest inter-harmonic valley
        to_valley = np.abs(freqs % f0 - 0.5 * f0)
        valley = to_valley <= max(0.15 * f0, 1.5 * bin_hz)
        if not np.any(valley):
            continue
        # noise PSD interpolated across the valleys covers bands narrower
        # than one harmonic spacing too
        noise_psd = np.interp(freqs, freqs[valley], power[i, valley])
        band_ap = np.ones(N_AP_BANDS)
        for b, mask in enumerate(band_masks):
            total = np.mean(power[i, mask]) if np.any(mask) else 0.0
            if total <= 0:
                continue
            band_ap[b] = min(np.mean(noise_psd[mask]) / total, 1.0)
        ap[i] = np.interp(freqs, centers, band_ap)
    return np.clip(ap, AP_FLOOR, 1.0)


def analyze(w: Waveform, cfg: AnalysisConfig | None = None) -> VocoderParams:
    """Decompose a waveform into fo / envelope / aperiodicity streams."""
    cfg = cfg or AnalysisConfig()
    if w.samples.size == 0:
        raise InvalidInput("cannot analyze an empty waveform")
    if w.sample_rate < MIN_SAMPLE_RATE:
        raise UnsupportedRate(
            f"sample rate {w.sample_rate} Hz below minimum {MIN_SAMPLE_RATE} Hz"
        )
    cfg.validate(w.sample_rate)

    sr = w.sample_rate
    x = w.samples
    fft_size = cfg.resolved_fft_size(sr)
    n_frames = int(x.size / sr / cfg.frame_period + 1e-9) + 1
    centers = np.round(np.arange(n_frames) * cfg.frame_period * sr).astype(np.int64)

    wlen = int(round(3.0 * sr / cfg.fo_floor)) | 1
    wlen = min(wlen, fft_size)
    frames = _frame_matrix(x, centers, wlen)

    fo = _yin_track(frames, sr, cfg)

    win = hann(wlen, sym=True)
    spec = np.fft.rfft(frames * win[None, :], fft_size, axis=1)
    power = np.abs(spec) ** 2 / np.sum(win**2)
    envelope = _smooth_envelope(power, fo, fft_size, sr, cfg.fo_floor)
    aperiodicity = _band_aperiodicity(power, fo, fft_size, sr, cfg.fo_floor)

    return VocoderParams(
        sample_rate=sr,
        frame_period=cfg.frame_period,
        fft_size=fft_size,
        fo=fo,
        envelope=envelope,
        aperiodicity=aperiodicity,
    )


# --- deterministic noise -----------------------------------------------------

_U64 = (1 << 64) - 1
_XS_MULT = 2685821657736338717


def xorshift64star_uniform(seed: int, n: int) -> np.ndarray:
    """n uniforms in [0, 1) from the xorshift64* generator; pure integer ops."""
    x = seed & _U64
    if x == 0:
        x = 0x9E3779B97F4A7C15
    out = np.empty(n)
    for i in range(n):
        x ^= x >> 12
        x = (x ^ (x << 25)) & _U64
        x ^= x >> 27
        out[i] = (((x * _XS_MULT) & _U64) >> 11) * (1.0 / (1 << 53))
    return out


def _minimum_phase_spectra(envelope: np.ndarray, fft_size: int) -> np.ndarray:
    """Minimum-phase transfer functions (one per frame) from power envelopes."""
    log_amp = 0.5 * np.log(np.maximum(envelope, ENVELOPE_FLOOR))
    ceps = np.fft.irfft(log_amp, fft_size, axis=1)
    half = fft_size // 2
    fold = np.zeros(fft_size)
    fold[0] = 1.0
    fold[1:half] = 2.0
    fold[half] = 1.0
    return np.exp(np.fft.rfft(ceps * fold[None, :], fft_size, axis=1))


def _pulse_train(fo_per_sample: np.ndarray, sample_rate: int) -> np.ndarray:
    """Phase-continuous impulse train; each impulse carries unit average power."""
    voiced = fo_per_sample > 0
    rate = np.where(voiced, fo_per_sample / sample_rate, 0.0)
    phase = np.cumsum(rate)
    ticks = np.diff(np.floor(phase), prepend=0.0) >= 1.0
    ticks &= voiced
    n = fo_per_sample.size
    idx = np.nonzero(ticks)[0]
    if idx.size == 0:
        return np.zeros(n)
    # each integer-phase crossing lands between samples; a windowed-sinc
    # fractional delay keeps both the period and the spectrum of every pulse
    # free of half-sample quantization artifacts
    half_taps = 16
    delta = np.clip((phase[idx] - np.floor(phase[idx]))
                    / np.maximum(rate[idx], 1e-12), 0.0, 1.0)
    offsets = np.arange(-half_taps, half_taps + 1)
    t = offsets[None, :] + delta[:, None]  # tap positions minus pulse time
    kernel = np.sinc(t) * (0.5 + 0.5 * np.cos(np.pi * t / (half_taps + 1)))
    kernel /= np.sqrt(np.sum(kernel**2, axis=1, keepdims=True))
    amp = np.sqrt(sample_rate / fo_per_sample[idx])
    buf = np.zeros(n + 2 * half_taps)
    np.add.at(buf, (idx[:, None] + half_taps + offsets[None, :]).ravel(),
              (amp[:, None] * kernel).ravel())
    return buf[half_taps: half_taps + n]


def synthesize(p: VocoderParams, seed: int = 0) -> Waveform:
    """Resynthesize a waveform from vocoder parameters; deterministic per seed."""
    p.validate()
    sr = p.sample_rate
    hop = p.frame_period * sr
    n_frames = p.frame_count
    n_out = int(round((n_frames - 1) * hop))
    if n_out == 0:
        n_out = max(int(round(hop)), 1)

    frame_idx = np.clip(np.round(np.arange(n_out) / hop).astype(np.int64), 0, n_frames - 1)
    fo_per_sample = p.fo[frame_idx]
    pulse = _pulse_train(fo_per_sample, sr)
    noise = math.sqrt(3.0) * (2.0 * xorshift64star_uniform(seed, n_out) - 1.0)

    wlen = 2 * int(round(hop))
    half = wlen // 2
    win = hann(wlen, sym=False)
    fft_size = p.fft_size
    # shifted coordinates: array index = original sample + half
    slack = wlen + fft_size
    psrc = np.concatenate([np.zeros(half), pulse, np.zeros(slack)])
    gsrc = np.concatenate([np.zeros(half), noise, np.zeros(slack)])

    centers = np.round(np.arange(n_frames) * hop).astype(np.int64)
    seg_idx = centers[:, None] + np.arange(wlen)[None, :]
    seg_p = psrc[seg_idx] * win[None, :]
    seg_g = gsrc[seg_idx] * win[None, :]

    transfer = _minimum_phase_spectra(p.envelope, fft_size)
    ap = np.clip(p.aperiodicity, AP_FLOOR, 1.0)
    spec_g = np.fft.rfft(seg_g, fft_size, axis=1)
    voiced = p.fo > 0
    mix = np.sqrt(ap) * spec_g
    if np.any(voiced):
        spec_p = np.fft.rfft(seg_p[voiced], fft_size, axis=1)
        mix[voiced] += np.sqrt(1.0 - ap[voiced]) * spec_p
    segments = np.fft.irfft(transfer * mix, fft_size, axis=1)

    total = n_out + half + slack
    out = np.zeros(total)
    wsum = np.zeros(total)
    for i in range(n_frames):
        c = centers[i]
        out[c: c + fft_size] += segments[i]
        wsum[c: c + wlen] += win
    out /= np.where(wsum > 1e-3, wsum, 1.0)
    y = out[half: half + n_out]
    peak = np.max(np.abs(y)) if y.size else 0.0
    if peak > 1.0:
        y = y * (0.99 / peak)
    return Waveform(samples=y, sample_rate=sr)
