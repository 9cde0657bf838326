import numpy as np
import pytest

from voicemorph import (
    AnchorColumn,
    AnchorSet,
    FrequencyAnchorPair,
    MorphInstance,
    MorphObject,
    VocoderParams,
    identity_anchors,
)

SR = 16000
FP = 0.005
NFFT = 512
NB = NFFT // 2 + 1


def flat_params(n_frames=41, fo=120.0, level=1e-3, ap=0.2, sr=SR, nfft=NFFT):
    nb = nfft // 2 + 1
    return VocoderParams(
        sample_rate=sr,
        frame_period=FP,
        fft_size=nfft,
        fo=np.full(n_frames, fo),
        envelope=np.full((n_frames, nb), level),
        aperiodicity=np.full((n_frames, nb), ap),
    )


def random_params(rng, n_frames=None, sr=SR, nfft=NFFT):
    n_frames = n_frames or rng.integers(15, 60)
    nb = nfft // 2 + 1
    fo = np.where(
        rng.random(n_frames) < 0.8,
        rng.uniform(80, 400, n_frames),
        0.0,
    )
    envelope = np.exp(rng.uniform(-20, 2, (n_frames, nb)))
    # stay inside the open (0, 1) logit domain; 1.0 itself is a clamp boundary
    ap = rng.uniform(1e-5, 1.0 - 1e-6, (n_frames, nb))
    return VocoderParams(
        sample_rate=sr, frame_period=FP, fft_size=nfft,
        fo=fo, envelope=envelope, aperiodicity=ap,
    )


def random_anchor_set(rng, duration_canonical, duration_instance, nyquist,
                      n_cols=None, pair_counts=None):
    n_cols = n_cols if n_cols is not None else int(rng.integers(0, 4))
    tc = np.sort(rng.uniform(0.05, 0.95, n_cols)) * duration_canonical
    ti = np.sort(rng.uniform(0.05, 0.95, n_cols)) * duration_instance
    while np.any(np.diff(tc) <= 1e-3) or np.any(np.diff(ti) <= 1e-3):
        tc = np.sort(rng.uniform(0.05, 0.95, n_cols)) * duration_canonical
        ti = np.sort(rng.uniform(0.05, 0.95, n_cols)) * duration_instance
    if pair_counts is None:
        pair_counts = [int(rng.integers(0, 3)) for _ in range(n_cols)]
    cols = []
    for c in range(n_cols):
        n_pairs = pair_counts[c]
        fc = np.sort(rng.uniform(0.05, 0.95, n_pairs)) * nyquist
        fi = np.sort(rng.uniform(0.05, 0.95, n_pairs)) * nyquist
        while np.any(np.diff(fc) <= 1.0) or np.any(np.diff(fi) <= 1.0):
            fc = np.sort(rng.uniform(0.05, 0.95, n_pairs)) * nyquist
            fi = np.sort(rng.uniform(0.05, 0.95, n_pairs)) * nyquist
        cols.append(AnchorColumn(
            t_canonical=float(tc[c]),
            t_instance=float(ti[c]),
            freq_anchors=tuple(
                FrequencyAnchorPair(float(a), float(b)) for a, b in zip(fc, fi)
            ),
        ))
    return AnchorSet(
        columns=tuple(cols),
        duration_canonical=duration_canonical,
        duration_instance=duration_instance,
        nyquist=nyquist,
    )


def random_morph_object(rng, k=2, sr=SR, nfft=NFFT):
    canonical = random_params(rng, sr=sr, nfft=nfft)
    instances = [MorphInstance(canonical, identity_anchors(canonical), label="canon")]
    n_cols = int(rng.integers(0, 4))
    pair_counts = [int(rng.integers(0, 3)) for _ in range(n_cols)]
    for j in range(1, k):
        p = random_params(rng, sr=sr, nfft=nfft)
        anchors = random_anchor_set(
            rng, canonical.duration, p.duration, p.nyquist,
            n_cols=n_cols, pair_counts=pair_counts,
        )
        instances.append(MorphInstance(p, anchors, label=f"inst{j}"))
    return MorphObject(instances=tuple(instances), canonical_index=0)


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
