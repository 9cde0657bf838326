"""
A stimulus continuum between two voices
=======================================

Morphs between a 100 Hz and a 200 Hz instance at evenly spaced rates.
All five attributes (time axis, frequency axis, level, F0, aperiodicity)
interpolate in their transform domains, so F0 moves geometrically:
100 * 2^rate Hz.
"""

import numpy as np

from voicemorph import (
    AnchorSet,
    MorphInstance,
    MorphObject,
    Waveform,
    analyze,
    continuum,
    identity_anchors,
    write_wav,
)

sr = 16000
t = np.arange(sr // 2) / sr


def saw(hz):
    x = sum(np.sin(2 * np.pi * k * hz * t) / k for k in range(1, int(sr / 2 / hz) + 1))
    return Waveform(0.4 * x / np.max(np.abs(x)), sr)


lo = analyze(saw(100.0))
hi = analyze(saw(200.0))

obj = MorphObject(instances=(
    MorphInstance(lo, identity_anchors(lo), label="low"),
    MorphInstance(hi, AnchorSet((), lo.duration, hi.duration, hi.nyquist),
                  label="high"),
))

# rates outside [0, 1] extrapolate: -0.25 dips below the low voice
rates = np.linspace(-0.25, 1.25, 7)
for i, (rate, audio) in enumerate(zip(rates, continuum(obj, rates, seed=0))):
    measured = analyze(audio)
    fo = np.median(measured.fo[measured.fo > 0])
    print(f"rate {rate:+.2f} -> measured F0 {fo:7.2f} Hz "
          f"(expected {100 * 2 ** rate:7.2f})")
    write_wav(f"continuum_{i}_{rate:+.2f}.wav", audio)
