"""Monaural waveform container and RIFF/WAVE file I/O."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from .errors import InvalidInput, UnsupportedRate

MIN_SAMPLE_RATE = 8000


@dataclass(frozen=True)
class Waveform:
    """Mono audio signal with float64 samples nominally in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate <= 0:
            raise InvalidInput(f"sample_rate must be positive, got {self.sample_rate}")
        if samples.ndim != 1:
            raise InvalidInput("waveform must be mono (1-D sample array)")
        if samples.size and not np.all(np.isfinite(samples)):
            raise InvalidInput("waveform contains non-finite samples")

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def read_wav(source) -> Waveform:
    """Read a mono PCM16 or float32 WAV file (path, file object, or bytes)."""
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(bytes(source))
    try:
        rate, data = wavfile.read(source)
    except InvalidInput:
        raise
    except Exception as exc:
        raise InvalidInput(f"not a readable WAV file: {exc}") from exc
    if data.ndim != 1:
        raise InvalidInput(f"expected mono audio, got {data.shape[1]} channels")
    if rate < MIN_SAMPLE_RATE:
        raise UnsupportedRate(f"sample rate {rate} Hz below minimum {MIN_SAMPLE_RATE} Hz")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise InvalidInput(f"unsupported WAV sample format {data.dtype}")
    return Waveform(samples=samples, sample_rate=int(rate))


def write_wav(target, w: Waveform, fmt: str = "float32") -> None:
    """Write a waveform as mono WAV; fmt is 'float32' or 'pcm16'."""
    if fmt == "float32":
        data = w.samples.astype(np.float32)
    elif fmt == "pcm16":
        clipped = np.clip(w.samples, -1.0, 1.0)
        data = np.round(clipped * 32767.0).astype(np.int16)
    else:
        raise InvalidInput(f"unknown WAV format {fmt!r}")
    wavfile.write(target, w.sample_rate, data)


def wav_bytes(w: Waveform, fmt: str = "float32") -> bytes:
    buf = io.BytesIO()
    write_wav(buf, w, fmt=fmt)
    return buf.getvalue()
