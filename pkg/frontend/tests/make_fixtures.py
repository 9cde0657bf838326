"""Writes small .vocp fixtures for the frontend integration tests."""
import pathlib
import sys

import numpy as np

from voicemorph import VocoderParams, write_vocp

out = pathlib.Path(sys.argv[1])
out.mkdir(parents=True, exist_ok=True)

sr, nfft = 16000, 512
nb = nfft // 2 + 1
freqs = np.arange(nb) * sr / nfft


def make(n_frames, fo, peak_hz):
    env = 1e-6 + 1e-5 * np.exp(6.0 * np.exp(-0.5 * ((freqs - peak_hz) / 150.0) ** 2))
    return VocoderParams(sr, 0.005, nfft, np.full(n_frames, float(fo)),
                         np.tile(env, (n_frames, 1)), np.full((n_frames, nb), 0.3))


write_vocp(out / "canonical.vocp", make(60, 120.0, 1000.0))
write_vocp(out / "nonlinear.vocp", make(80, 150.0, 1400.0))
for i, (fo, peak) in enumerate([(110.0, 900.0), (140.0, 1200.0), (180.0, 1600.0)]):
    write_vocp(out / f"demo{i}.vocp", make(50, fo, peak))
