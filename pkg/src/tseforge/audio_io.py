"""Mono 16 kHz WAV reading, writing, segmentation, and reference assembly.

The only audio format touched is RIFF/WAVE, 16-bit little-endian PCM,
mono, 16000 Hz. Anything else is a hard error: silent resampling would
hide corpus bugs. All operations are pure given (input, seed).
"""

from __future__ import annotations

import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IoError, UnsupportedFormat
from .rng import SeededRng

SAMPLE_RATE = 16000
_FULL_SCALE = 32768.0


@dataclass
class Waveform:
    """Mono sample sequence at 16 kHz, amplitudes nominally in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise UnsupportedFormat(f"expected mono samples, got shape {self.samples.shape}")
        if self.sample_rate != SAMPLE_RATE:
            raise UnsupportedFormat(f"sample rate {self.sample_rate} Hz, only {SAMPLE_RATE} supported")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise ValueError("waveform contains non-finite samples")

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate


@dataclass
class ClipReport:
    """Count of samples clamped to full scale during a write."""

    clipped: int = 0


def read_wav(path) -> Waveform:
    """Read a 16-bit mono 16 kHz PCM WAV; samples scaled by exactly 1/32768."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    try:
        with wave.open(str(path), "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            nframes = wf.getnframes()
            raw = wf.readframes(nframes)
    except wave.Error as exc:
        raise UnsupportedFormat(f"{path}: {exc}") from exc
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc
    if channels != 1:
        raise UnsupportedFormat(f"{path}: {channels} channels, expected mono")
    if width != 2:
        raise UnsupportedFormat(f"{path}: {8 * width}-bit samples, expected 16-bit")
    if rate != SAMPLE_RATE:
        raise UnsupportedFormat(f"{path}: {rate} Hz, expected {SAMPLE_RATE}")
    ints = np.frombuffer(raw, dtype="<i2")
    return Waveform(ints.astype(np.float64) / _FULL_SCALE)


def quantize(samples: np.ndarray) -> tuple[np.ndarray, int]:
    """Round half away from zero to int16, clamping; returns (ints, clip count)."""
    scaled = np.asarray(samples, dtype=np.float64) * _FULL_SCALE
    rounded = np.where(scaled >= 0.0, np.floor(scaled + 0.5), np.ceil(scaled - 0.5))
    clipped = int(np.count_nonzero((rounded > 32767.0) | (rounded < -32768.0)))
    return np.clip(rounded, -32768.0, 32767.0).astype("<i2"), clipped


def write_wav(path, w: Waveform) -> ClipReport:
    """Write 16-bit PCM; byte-identical across platforms for identical input."""
    path = Path(path)
    ints, clipped = quantize(w.samples)
    try:
        with wave.open(str(path), "wb") as wf:
            wf.setnchannels(1)
            wf.setsampwidth(2)
            wf.setframerate(w.sample_rate)
            wf.writeframes(ints.tobytes())
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc
    return ClipReport(clipped)


def segment(w: Waveform, seconds: float = 6.0, rng: SeededRng | None = None) -> list[Waveform]:
    """Split into fixed-length segments on a randomly offset grid.

    The grid offset is drawn uniformly from [0, len mod seglen); the final
    short remainder is zero-padded at the end. With offset 0, stripping the
    padding and concatenating reproduces the input exactly.
    """
    if len(w) == 0:
        raise UnsupportedFormat("cannot segment an empty waveform")
    if seconds <= 0:
        raise ValueError("segment length must be positive")
    seg_len = int(round(seconds * w.sample_rate))
    total = len(w)
    leftover = total % seg_len
    offset = 0
    if leftover > 0 and rng is not None:
        offset = int(rng.integers(0, leftover))
    out = []
    n_segments = max(1, -(-(total - offset) // seg_len))
    for i in range(n_segments):
        start = offset + i * seg_len
        chunk = w.samples[start : start + seg_len]
        if chunk.shape[0] < seg_len:
            chunk = np.concatenate([chunk, np.zeros(seg_len - chunk.shape[0])])
        out.append(Waveform(chunk))
    return out


def build_reference(utterances: list[Waveform], rng: SeededRng) -> Waveform:
    """Concatenate shuffled utterances until at least 10 s, capped at 15 s.

    If less than 10 s of material exists in total, everything is used and
    nothing is padded.
    """
    if not utterances:
        raise ValueError("reference pool is empty")
    min_len = 10 * SAMPLE_RATE
    max_len = 15 * SAMPLE_RATE
    order = rng.permutation(len(utterances))
    parts = []
    total = 0
    for idx in order:
        parts.append(utterances[int(idx)].samples)
        total += parts[-1].shape[0]
        if total >= min_len:
            break
    joined = np.concatenate(parts)
    return Waveform(joined[:max_len])
