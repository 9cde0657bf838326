import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voicemorph import (
    AnchorColumn,
    AnchorSet,
    FrequencyAnchorPair,
    MorphInstance,
    VocoderParams,
    frequency_pairs_at,
    identity_anchors,
    resample_to_canonical,
    warp_frequency,
    warp_time,
)
from voicemorph.errors import InvalidAnchors, OutOfRange

from conftest import FP, NB, NFFT, SR, flat_params, random_anchor_set

NYQ = SR / 2


def simple_set(columns=(), dc=1.0, di=1.0):
    return AnchorSet(columns=columns, duration_canonical=dc,
                     duration_instance=di, nyquist=NYQ)


class TestWarpTime:
    def test_identity_no_columns(self):
        a = simple_set()
        assert warp_time(a, 0.25) == 0.25

    def test_single_column_interpolation(self):
        a = simple_set((AnchorColumn(0.5, 0.7),))
        assert warp_time(a, 0.25) == pytest.approx(0.35, abs=1e-12)

    def test_endpoints_fixed(self):
        a = simple_set((AnchorColumn(0.5, 0.7),))
        assert warp_time(a, 0.0) == 0.0
        assert warp_time(a, 1.0) == 1.0

    def test_out_of_range(self):
        a = simple_set()
        with pytest.raises(OutOfRange):
            warp_time(a, 1.5)
        with pytest.raises(OutOfRange):
            warp_time(a, -0.1)

    def test_strictly_increasing(self, rng):
        a = random_anchor_set(rng, 1.0, 0.8, NYQ, n_cols=3)
        ts = np.linspace(0, 1.0, 257)
        ws = [warp_time(a, t) for t in ts]
        assert np.all(np.diff(ws) > 0)

    def test_point_on_line_is_noop(self):
        a = simple_set((AnchorColumn(0.5, 0.7),))
        mid = warp_time(a, 0.25)
        a2 = simple_set((AnchorColumn(0.25, mid), AnchorColumn(0.5, 0.7)))
        for t in np.linspace(0, 1, 101):
            assert abs(warp_time(a, t) - warp_time(a2, t)) <= 1e-12

    def test_monotonicity_enforced(self):
        with pytest.raises(InvalidAnchors):
            simple_set((AnchorColumn(0.5, 0.7), AnchorColumn(0.6, 0.6)))
        with pytest.raises(InvalidAnchors):
            simple_set((AnchorColumn(0.6, 0.2), AnchorColumn(0.5, 0.4)))


class TestFrequencyPairsAt:
    def test_exact_column_hit(self):
        pair = FrequencyAnchorPair(1000.0, 1200.0)
        a = simple_set((AnchorColumn(0.5, 0.5, (pair,)),))
        assert frequency_pairs_at(a, 0.5) == (pair,)

    def test_between_columns_interpolates(self):
        a = simple_set((
            AnchorColumn(0.2, 0.2, (FrequencyAnchorPair(1000.0, 1200.0),)),
            AnchorColumn(0.4, 0.4, (FrequencyAnchorPair(1000.0, 1400.0),)),
        ))
        (p,) = frequency_pairs_at(a, 0.3)
        assert p.f_canonical == pytest.approx(1000.0)
        assert p.f_instance == pytest.approx(1300.0)

    def test_no_columns_identity(self):
        assert frequency_pairs_at(simple_set(), 0.37) == ()

    def test_unequal_counts_take_nearer(self):
        a = simple_set((
            AnchorColumn(0.2, 0.2, (FrequencyAnchorPair(1000.0, 1200.0),)),
            AnchorColumn(0.4, 0.4, (FrequencyAnchorPair(900.0, 950.0),
                                    FrequencyAnchorPair(2000.0, 2100.0))),
        ))
        assert len(frequency_pairs_at(a, 0.25)) == 1
        assert len(frequency_pairs_at(a, 0.35)) == 2

    def test_outside_columns_holds_nearest(self):
        pair = FrequencyAnchorPair(1000.0, 1200.0)
        a = simple_set((AnchorColumn(0.5, 0.5, (pair,)),))
        assert frequency_pairs_at(a, 0.1) == (pair,)
        assert frequency_pairs_at(a, 0.9) == (pair,)


class TestWarpFrequency:
    def test_identity_empty(self):
        assert warp_frequency((), 22050.0, 3000.0) == 3000.0

    def test_single_pair(self):
        pairs = (FrequencyAnchorPair(1000.0, 1500.0),)
        assert warp_frequency(pairs, 22050.0, 500.0) == pytest.approx(750.0)

    def test_nyquist_fixed_point(self):
        pairs = (FrequencyAnchorPair(1000.0, 1500.0),)
        assert warp_frequency(pairs, 22050.0, 22050.0) == 22050.0
        assert warp_frequency(pairs, 22050.0, 0.0) == 0.0

    def test_non_monotone_rejected(self):
        pairs = (FrequencyAnchorPair(1000.0, 1500.0),
                 FrequencyAnchorPair(2000.0, 1400.0))
        with pytest.raises(InvalidAnchors):
            warp_frequency(pairs, 22050.0, 500.0)

    @given(st.floats(min_value=100.0, max_value=7900.0),
           st.floats(min_value=100.0, max_value=7900.0))
    @settings(max_examples=50, deadline=None)
    def test_round_trip_inverse(self, fc, fi):
        pairs = (FrequencyAnchorPair(fc, fi),)
        inverse = (FrequencyAnchorPair(fi, fc),)
        for f in (50.0, fc / 2, fc, (fc + NYQ) / 2, NYQ):
            fwd = warp_frequency(pairs, NYQ, f)
            back = warp_frequency(inverse, NYQ, fwd)
            assert back == pytest.approx(f, abs=1e-6)


class TestResample:
    def test_identity_bit_equal(self):
        p = flat_params(n_frames=31)
        inst = MorphInstance(p, identity_anchors(p))
        out = resample_to_canonical(inst, p.frame_times)
        assert np.array_equal(out.fo, p.fo)
        assert np.array_equal(out.envelope, p.envelope)
        assert np.array_equal(out.aperiodicity, p.aperiodicity)

    def test_time_compression_maps_content(self):
        # envelope value encodes the frame index; warping 1.0 s onto 0.5 s
        # must fetch instance content from 2t
        n = 41  # 0.2 s instance
        nb = NB
        env = np.tile(np.arange(1.0, n + 1.0)[:, None], (1, nb))
        p = VocoderParams(SR, FP, NFFT, np.zeros(n), env, np.full((n, nb), 0.5))
        a = AnchorSet((), duration_canonical=0.1, duration_instance=0.2, nyquist=NYQ)
        inst = MorphInstance(p, a)
        times = np.arange(21) * FP  # canonical 0.1 s grid
        out = resample_to_canonical(inst, times)
        assert out.frame_count == 21
        for i, t in enumerate(times):
            assert out.envelope[i, 0] == pytest.approx(1.0 + 2 * t / FP, rel=1e-9)

    def test_frequency_peak_moves_to_inverse_position(self):
        nb = NB
        freqs = np.arange(nb) * SR / NFFT
        peak_hz = 1000.0
        env = np.exp(-0.5 * ((freqs - peak_hz) / 60.0) ** 2) + 1e-8
        n = 21
        p = VocoderParams(SR, FP, NFFT, np.zeros(n), np.tile(env, (n, 1)),
                          np.full((n, nb), 0.5))
        a = AnchorSet(
            (AnchorColumn(0.05, 0.05, (FrequencyAnchorPair(1000.0 * 1000 / 1500, 1000.0),)),),
            duration_canonical=0.1, duration_instance=0.1, nyquist=NYQ,
        )
        inst = MorphInstance(p, a)
        out = resample_to_canonical(inst, p.frame_times)
        peak_bin = np.argmax(out.envelope[10])
        assert freqs[peak_bin] == pytest.approx(1000.0 * 1000 / 1500, abs=SR / NFFT)

    def test_instance_duration_mismatch_rejected(self):
        p = flat_params(n_frames=31)
        a = AnchorSet((), duration_canonical=1.0, duration_instance=0.5, nyquist=p.nyquist)
        with pytest.raises(InvalidAnchors):
            MorphInstance(p, a)
