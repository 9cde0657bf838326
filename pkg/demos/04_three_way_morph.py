"""
Three-way morphing with area coordinates
========================================

Three instances sit at the vertices of a triangle; any 2-D point inside
maps to barycentric weights. A per-attribute weight matrix can pin single
attributes to one vertex while the rest follow the point.
"""

import numpy as np

from voicemorph import (
    AnchorSet,
    Attribute,
    MorphInstance,
    MorphObject,
    Waveform,
    WeightMatrix,
    analyze,
    area_coordinates,
    morph,
    synthesize,
    write_wav,
)

sr = 16000
t = np.arange(sr // 2) / sr


def saw(hz):
    x = sum(np.sin(2 * np.pi * k * hz * t) / k for k in range(1, int(sr / 2 / hz) + 1))
    return Waveform(0.4 * x / np.max(np.abs(x)), sr)


voices = [analyze(saw(hz)) for hz in (110.0, 165.0, 247.5)]
obj = MorphObject(instances=tuple(
    MorphInstance(p, AnchorSet((), voices[0].duration, p.duration, p.nyquist),
                  label=f"v{i}")
    for i, p in enumerate(voices)
))

# an equilateral triangle and a few probe points
tri = ((0.0, 0.0), (1.0, 0.0), (0.5, np.sqrt(3) / 2))
for name, p in [("vertex 0", tri[0]), ("centroid", (0.5, np.sqrt(3) / 6)),
                ("edge 0-1", (0.5, 0.0))]:
    w = area_coordinates(p, tri)
    audio = synthesize(morph(obj, WeightMatrix.uniform(w)), seed=0)
    measured = analyze(audio)
    fo = np.median(measured.fo[measured.fo > 0])
    print(f"{name:9s} weights ({w[0]:.3f}, {w[1]:.3f}, {w[2]:.3f}) "
          f"-> F0 {fo:6.2f} Hz")
    write_wav(f"threeway_{name.replace(' ', '_').replace('-', '')}.wav", audio)

# pin F0 to vertex 0 while everything else sits at the centroid
w = area_coordinates((0.5, np.sqrt(3) / 6), tri)
rows = {attr: np.array(w) for attr in Attribute}
rows[Attribute.FO] = np.array([1.0, 0.0, 0.0])
pinned = synthesize(morph(obj, WeightMatrix(rows=rows)), seed=0)
measured = analyze(pinned)
print(f"F0 pinned to vertex 0: "
      f"{np.median(measured.fo[measured.fo > 0]):.2f} Hz (voice 0 is 110 Hz)")
