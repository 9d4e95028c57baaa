"""16 kHz front end: WAV reading and log-mel analysis at 50 frames/s."""

import math
import wave

import numpy as np

from .errors import AudioError

SAMPLE_RATE = 16000
N_FFT = 512
HOP = 320  # 20 ms, so 50 frames per second
N_MELS = 40
_EPS = 1e-10

_MEL_FILTERS = None
_WINDOW = np.hanning(N_FFT + 1)[:-1]  # periodic


def read_wav16k(path) -> np.ndarray:
    try:
        with wave.open(str(path), "rb") as fh:
            if fh.getframerate() != SAMPLE_RATE:
                raise AudioError(f"{path}: expected {SAMPLE_RATE} Hz, got {fh.getframerate()}")
            if fh.getnchannels() != 1:
                raise AudioError(f"{path}: expected mono, got {fh.getnchannels()} channels")
            if fh.getsampwidth() != 2:
                raise AudioError(f"{path}: expected 16-bit PCM, got {8 * fh.getsampwidth()}-bit")
            raw = fh.readframes(fh.getnframes())
    except (wave.Error, EOFError, OSError) as exc:
        raise AudioError(f"{path}: {exc}") from exc
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if samples.size == 0:
        raise AudioError(f"{path}: empty audio")
    return samples


def _mel_filters() -> np.ndarray:
    """40 triangular filters, HTK mel spacing, over the 257 rfft bins."""
    global _MEL_FILTERS
    if _MEL_FILTERS is None:
        top_mel = 2595.0 * math.log10(1.0 + (SAMPLE_RATE / 2) / 700.0)
        mels = np.linspace(0.0, top_mel, N_MELS + 2)
        edges = 700.0 * (10.0 ** (mels / 2595.0) - 1.0)
        bin_freqs = np.arange(N_FFT // 2 + 1) * (SAMPLE_RATE / N_FFT)
        weights = np.zeros((N_MELS, bin_freqs.size))
        for i in range(N_MELS):
            rising = (bin_freqs - edges[i]) / (edges[i + 1] - edges[i])
            falling = (edges[i + 2] - bin_freqs) / (edges[i + 2] - edges[i + 1])
            weights[i] = np.maximum(0.0, np.minimum(rising, falling))
        _MEL_FILTERS = weights
    return _MEL_FILTERS


def logmel(samples: np.ndarray) -> np.ndarray:
    """(T, 40) log-mel energies, T = ceil(len/HOP), centered reflect framing."""
    n = samples.shape[0]
    if n < HOP:
        raise AudioError(f"audio too short for one {HOP / SAMPLE_RATE * 1000:.0f} ms frame")
    n_frames = math.ceil(n / HOP)
    padded = np.pad(samples, N_FFT // 2, mode="reflect")
    starts = np.arange(n_frames) * HOP
    windows = np.lib.stride_tricks.sliding_window_view(padded, N_FFT)[starts]
    spectrum = np.fft.rfft(windows * _WINDOW, axis=1)
    power = spectrum.real**2 + spectrum.imag**2
    return np.log(power @ _mel_filters().T + _EPS)


def smooth(feats: np.ndarray, passes: int) -> np.ndarray:
    """Width-3 moving average along time, edge-replicated, applied repeatedly."""
    out = feats
    for _ in range(passes):
        padded = np.pad(out, ((1, 1), (0, 0)), mode="edge")
        out = (padded[:-2] + padded[1:-1] + padded[2:]) / 3.0
    return out
