"""Interpolation/extrapolation of vocoder parameters across K instances.

Every attribute is pushed through a range-to-R transform, combined as a
weighted sum with weights summing to 1, and mapped back. Time and frequency
axes interpolate in the log domain of segment lengths (durations / frequency
gaps), which keeps the morphed axes strictly increasing for arbitrary real
weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .anchors import MorphInstance
from .errors import (
    AnchorTopologyMismatch,
    DegenerateTriangle,
    DomainError,
    InvalidInput,
    InvalidWeights,
)
from .vocoder import AP_FLOOR, ENVELOPE_FLOOR, VocoderParams, synthesize

WEIGHT_SUM_TOL = 1e-9
_AP_CEIL = 1.0 - 1e-6
_EXP_CAP = 700.0  # exp() overflows just above this


class Attribute(Enum):
    TX = "tx"  # time axis
    FX = "fx"  # frequency axis
    SL = "sl"  # spectrum level
    FO = "fo"  # fundamental frequency
    AP = "ap"  # aperiodicity


def transform(attr: Attribute, x: float) -> float:
    """Map an attribute value onto the real line (log, or logit for ap)."""
    x = float(x)
    if attr is Attribute.AP:
        if not (0.0 < x <= 1.0):
            raise DomainError(f"aperiodicity {x} outside (0, 1]")
        xc = min(max(x, AP_FLOOR), _AP_CEIL)
        return math.log(xc / (1.0 - xc))
    if x <= 0.0:
        raise DomainError(f"{attr.value} value {x} must be positive")
    return math.log(x)


def inverse_transform(attr: Attribute, y: float) -> float:
    y = float(y)
    if attr is Attribute.AP:
        if y >= 0:
            return 1.0 / (1.0 + math.exp(-min(y, _EXP_CAP)))
        e = math.exp(max(y, -_EXP_CAP))
        return e / (1.0 + e)
    return math.exp(min(y, _EXP_CAP))


def _check_weights(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise InvalidWeights("weights must be a non-empty vector")
    s = float(np.sum(w))
    if abs(s - 1.0) > WEIGHT_SUM_TOL:
        raise InvalidWeights(f"weights must sum to 1, got {s}")
    return w


def morph_scalar(attr: Attribute, xs, w) -> float:
    """Weighted combination of K values in the attribute's transform domain."""
    value, _ = morph_scalar_ex(attr, xs, w)
    return value


def morph_scalar_ex(attr: Attribute, xs, w) -> tuple[float, bool]:
    """morph_scalar plus a flag marking results capped against overflow."""
    w = _check_weights(w)
    xs = list(xs)
    if len(xs) != w.size:
        raise InvalidWeights(f"{len(xs)} values vs {w.size} weights")
    s = float(np.dot(w, [transform(attr, x) for x in xs]))
    clamped = abs(s) > _EXP_CAP and attr is not Attribute.AP
    return inverse_transform(attr, s), clamped


_ATTRS = tuple(Attribute)


@dataclass(frozen=True)
class WeightMatrix:
    """One weight vector of length K per attribute; each row sums to 1."""

    rows: dict

    def __post_init__(self):
        rows = {}
        k = None
        for attr in _ATTRS:
            if attr not in self.rows:
                raise InvalidWeights(f"missing weight row for {attr.value}")
            row = _check_weights(self.rows[attr])
            if k is None:
                k = row.size
            elif row.size != k:
                raise InvalidWeights("all weight rows must have the same length")
            rows[attr] = row
        object.__setattr__(self, "rows", rows)

    @property
    def k(self) -> int:
        return next(iter(self.rows.values())).size

    def row(self, attr: Attribute) -> np.ndarray:
        return self.rows[attr]

    @classmethod
    def uniform(cls, w) -> "WeightMatrix":
        w = np.asarray(w, dtype=np.float64)
        return cls(rows={attr: w.copy() for attr in _ATTRS})

    @classmethod
    def unit(cls, index: int, k: int) -> "WeightMatrix":
        w = np.zeros(k)
        w[index] = 1.0
        return cls.uniform(w)


def rate_to_weights(rate: float, k: int = 2) -> WeightMatrix:
    """Two-instance slider mapping: every row becomes (1 - rate, rate)."""
    if k != 2:
        raise InvalidWeights("rate_to_weights is defined for two instances")
    return WeightMatrix.uniform(np.array([1.0 - rate, float(rate)]))


@dataclass(frozen=True)
class MorphObject:
    """K aligned instances sharing one canonical time-frequency axis."""

    instances: tuple[MorphInstance, ...]
    canonical_index: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        if len(self.instances) < 2:
            raise InvalidInput("a morph object needs at least two instances")
        if not (0 <= self.canonical_index < len(self.instances)):
            raise InvalidInput(f"canonical_index {self.canonical_index} out of range")
        canon = self.instances[self.canonical_index]
        if not canon.anchors.is_identity:
            raise InvalidInput("the canonical instance must carry an identity anchor set")
        for inst in self.instances:
            if inst.params.sample_rate != canon.params.sample_rate:
                raise InvalidInput("all instances must share one sample rate")
            if inst.params.fft_size != canon.params.fft_size:
                raise InvalidInput("all instances must share one fft size")
            if inst.params.frame_period != canon.params.frame_period:
                raise InvalidInput("all instances must share one frame period")

    @property
    def k(self) -> int:
        return len(self.instances)

    @property
    def canonical(self) -> MorphInstance:
        return self.instances[self.canonical_index]


def _check_topology(obj: MorphObject) -> None:
    """Non-canonical instances must agree on column count and pair counts.

    The canonical instance carries identity anchors and is compatible with any
    topology; correspondence across instances lives on the canonical axis.
    """
    ref = None
    for i, inst in enumerate(obj.instances):
        if i == obj.canonical_index:
            continue
        counts = tuple(len(c.freq_anchors) for c in inst.anchors.columns)
        if ref is None:
            ref = counts
        elif counts != ref:
            raise AnchorTopologyMismatch(
                f"anchor topology differs across instances: {counts} vs {ref}"
            )


def _dedupe_sorted(values, tol):
    out = []
    for v in values:
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def _merged_time_grid(obj: MorphObject) -> np.ndarray:
    """Union of all canonical-side anchor times, with virtual boundaries."""
    dc = obj.canonical.params.duration
    inner = sorted(
        c.t_canonical
        for inst in obj.instances
        for c in inst.anchors.columns
        if 1e-9 < c.t_canonical < dc - 1e-9
    )
    return np.array([0.0, *_dedupe_sorted(inner, 1e-9), dc])


def _instance_time_breaks(obj: MorphObject) -> tuple[np.ndarray, np.ndarray]:
    """Merged canonical grid and each instance's warped times on it: (K, P)."""
    grid = _merged_time_grid(obj)
    rows = []
    for inst in obj.instances:
        tc, ti = inst.anchors.time_breakpoints()
        rows.append(np.interp(grid, tc, ti))
    return grid, np.stack(rows)


def morph_time_axis(obj: MorphObject, w_tx) -> np.ndarray:
    """Morphed anchor times (with boundaries) from log-domain segment durations."""
    w = _check_weights(w_tx)
    if w.size != obj.k:
        raise InvalidWeights(f"expected {obj.k} weights, got {w.size}")
    _check_topology(obj)
    _, breaks = _instance_time_breaks(obj)
    durations = np.maximum(np.diff(breaks, axis=1), 1e-12)  # (K, P-1)
    morphed = np.exp(w @ np.log(durations))
    return np.concatenate([[0.0], np.cumsum(morphed)])


def _freq_break_rows(obj: MorphObject, t_canonical: float) -> np.ndarray | None:
    """Each instance's frequency warp sampled on the merged canonical anchor grid.

    Returns (K, P+2) instance-side frequencies including 0/Nyquist boundaries,
    or None when no instance carries frequency anchors at this time.
    """
    from .anchors import frequency_pairs_at, warp_frequency

    nyq = obj.canonical.params.nyquist
    pair_sets = [frequency_pairs_at(inst.anchors, t_canonical) for inst in obj.instances]
    inner = sorted(
        p.f_canonical for pairs in pair_sets for p in pairs
        if 1e-6 < p.f_canonical < nyq - 1e-6
    )
    inner = _dedupe_sorted(inner, 1e-6)
    if not inner:
        return None
    grid = np.array([0.0, *inner, nyq])
    return np.stack([warp_frequency(pairs, nyq, grid) for pairs in pair_sets])


def morph_frequency_axis(obj: MorphObject, t_canonical: float, w_fx):
    """Morphed frequency breakpoints at one canonical time, or None without anchors.

    Returns (morphed_breaks, instance_break_rows); the morphed axis spans
    [0, Nyquist] and is strictly increasing for any weights summing to 1
    because every log-domain gap maps through exp to a positive gap.
    """
    w = _check_weights(w_fx)
    if w.size != obj.k:
        raise InvalidWeights(f"expected {obj.k} weights, got {w.size}")
    f_breaks = _freq_break_rows(obj, t_canonical)
    if f_breaks is None:
        return None
    nyq = obj.canonical.params.nyquist
    gaps = np.maximum(np.diff(f_breaks, axis=1), 1e-9)
    m_gaps = np.exp(w @ np.log(gaps))
    m_gaps *= nyq / np.sum(m_gaps)
    m_breaks = np.concatenate([[0.0], np.cumsum(m_gaps)])
    m_breaks[-1] = nyq
    return m_breaks, f_breaks


def morph(obj: MorphObject, weights: WeightMatrix) -> VocoderParams:
    """Produce morphed vocoder parameters from K instances per the weight matrix."""
    if weights.k != obj.k:
        raise InvalidWeights(f"weight rows have {weights.k} entries for {obj.k} instances")
    _check_topology(obj)
    canon_params = obj.canonical.params
    fp = canon_params.frame_period
    sr = canon_params.sample_rate
    nfft = canon_params.fft_size
    nb = canon_params.n_bins
    nyq = canon_params.nyquist
    k = obj.k

    t_breaks = morph_time_axis(obj, weights.row(Attribute.TX))
    canon_grid, inst_breaks = _instance_time_breaks(obj)
    n_segments = t_breaks.size - 1
    duration = t_breaks[-1]
    n_frames = int(duration / fp + 1e-9) + 1
    times = np.arange(n_frames) * fp

    # locate each output frame on the morphed axis and in every instance
    seg = np.clip(np.searchsorted(t_breaks, times, side="right") - 1, 0, n_segments - 1)
    seg_len = t_breaks[seg + 1] - t_breaks[seg]
    u = np.clip((times - t_breaks[seg]) / seg_len, 0.0, 1.0)
    t_canon = (1.0 - u) * canon_grid[seg] + u * canon_grid[seg + 1]
    t_inst = (1.0 - u)[None, :] * inst_breaks[:, seg] + u[None, :] * inst_breaks[:, seg + 1]

    from .anchors import _interp_frames  # frame-grid sampling shared with resampling

    fo_k = np.empty((k, n_frames))
    env_k = np.empty((k, n_frames, nb))
    ap_k = np.empty((k, n_frames, nb))
    for j, inst in enumerate(obj.instances):
        fo_k[j], env_k[j], ap_k[j] = _interp_frames(
            inst.params, np.clip(t_inst[j], 0.0, inst.params.duration)
        )

    w_fx = weights.row(Attribute.FX)
    w_sl = weights.row(Attribute.SL)
    w_fo = weights.row(Attribute.FO)
    w_ap = weights.row(Attribute.AP)

    bin_freqs = np.arange(nb) * (sr / nfft)
    out_env = np.empty((n_frames, nb))
    out_ap = np.empty((n_frames, nb))
    out_fo = np.zeros(n_frames)

    for i in range(n_frames):
        axis = morph_frequency_axis(
            obj, float(np.clip(t_canon[i], 0.0, canon_grid[-1])), w_fx)
        if axis is not None:
            m_breaks, f_breaks = axis
        else:
            m_breaks = None

        log_env = np.zeros(nb)
        logit_ap = np.zeros(nb)
        for j in range(k):
            le = np.log(np.maximum(env_k[j, i], ENVELOPE_FLOOR))
            ac = np.clip(ap_k[j, i], AP_FLOOR, _AP_CEIL)
            la = np.log(ac / (1.0 - ac))
            if m_breaks is not None:
                # resample in the transform domain: tiny frequency-axis
                # round-off then perturbs log values, not raw ratios
                f_j = np.interp(bin_freqs, m_breaks, f_breaks[j])
                le = np.interp(f_j, bin_freqs, le)
                la = np.interp(f_j, bin_freqs, la)
            log_env += w_sl[j] * le
            logit_ap += w_ap[j] * la
        out_env[i] = np.exp(np.clip(log_env, -_EXP_CAP, _EXP_CAP))
        out_ap[i] = 1.0 / (1.0 + np.exp(-np.clip(logit_ap, -_EXP_CAP, _EXP_CAP)))

        voiced = fo_k[:, i] > 0
        if float(np.dot(w_fo, voiced)) >= 0.5:
            wv = w_fo * voiced
            s = float(np.sum(wv))
            if abs(s) > 1e-12:
                wv = wv / s
                out_fo[i] = math.exp(float(np.dot(wv[voiced], np.log(fo_k[voiced, i]))))

    return VocoderParams(
        sample_rate=sr,
        frame_period=fp,
        fft_size=nfft,
        fo=out_fo,
        envelope=np.maximum(out_env, ENVELOPE_FLOOR),
        aperiodicity=np.clip(out_ap, AP_FLOOR, 1.0),
    )


def area_coordinates(p, triangle) -> tuple[float, float, float]:
    """Barycentric weights of a 2-D point relative to a triangle."""

    def signed_area(a, b, c):
        return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    v1, v2, v3 = (tuple(map(float, v)) for v in triangle)
    p = tuple(map(float, p))
    total = signed_area(v1, v2, v3)
    if total == 0.0:
        raise DegenerateTriangle(f"triangle {triangle} has zero area")
    w1 = signed_area(p, v2, v3) / total
    w2 = signed_area(v1, p, v3) / total
    w3 = signed_area(v1, v2, p) / total
    return (w1, w2, w3)


def continuum(obj: MorphObject, rates, seed: int = 0):
    """Synthesized stimuli at the given morphing rates (two-instance objects)."""
    if obj.k != 2:
        raise InvalidInput("continuum generation needs exactly two instances")
    rates = [float(r) for r in rates]
    if not all(math.isfinite(r) for r in rates):
        raise InvalidInput("morphing rates must be finite")
    return [synthesize(morph(obj, rate_to_weights(r)), seed) for r in rates]
