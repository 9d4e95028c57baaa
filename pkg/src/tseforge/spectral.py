"""STFT analysis/synthesis and complex-ratio-mask utilities.

512-point FFT with a periodic Hann window (32 ms at 16 kHz) and a
128-sample hop (8 ms). Analysis and synthesis share the window; with a
quarter-window hop the squared-window overlap is constant (COLA), so
istft(stft(x)) reproduces x to floating-point precision. Spectrograms
are complex128 arrays of shape (frames, 257).
"""

from __future__ import annotations

import numpy as np
from scipy.signal import get_window

from .audio_io import Waveform
from .errors import DimMismatch, TooShort
from .features import write_fmx

N_FFT = 512
HOP = 128
N_BINS = N_FFT // 2 + 1
_PAD = N_FFT // 2
_WINDOW = get_window("hann", N_FFT, fftbins=True)


def _check_spec(spec) -> np.ndarray:
    s = np.asarray(spec)
    if s.ndim != 2 or s.shape[1] != N_BINS:
        raise DimMismatch(f"expected (frames, {N_BINS}) spectrogram, got {s.shape}")
    return s.astype(np.complex128, copy=False)


def stft(w: Waveform) -> np.ndarray:
    """Centered STFT with reflect padding; returns (ceil(L/128), 257) complex."""
    x = w.samples
    if len(x) < N_FFT:
        raise TooShort(f"need at least {N_FFT} samples, got {len(x)}")
    n_frames = -(-len(x) // HOP)
    padded = np.pad(x, _PAD, mode="reflect")
    starts = np.arange(n_frames) * HOP
    frames = np.lib.stride_tricks.sliding_window_view(padded, N_FFT)[starts]
    return np.fft.rfft(frames * _WINDOW, n=N_FFT, axis=1)


def istft(spec, length: int) -> Waveform:
    """Weighted overlap-add inverse; trims center padding, returns `length` samples."""
    s = _check_spec(spec)
    n_frames = s.shape[0]
    buf_len = (n_frames - 1) * HOP + N_FFT
    if length < 1 or _PAD + length > buf_len:
        raise DimMismatch(f"length {length} inconsistent with {n_frames} frames")
    frames = np.fft.irfft(s, n=N_FFT, axis=1) * _WINDOW
    out = np.zeros(buf_len)
    wsum = np.zeros(buf_len)
    wsq = _WINDOW * _WINDOW
    for t in range(n_frames):
        out[t * HOP : t * HOP + N_FFT] += frames[t]
        wsum[t * HOP : t * HOP + N_FFT] += wsq
    live = wsum > 1e-10
    out[live] /= wsum[live]
    return Waveform(out[_PAD : _PAD + length])


def ideal_crm(target_spec, mix_spec, clamp: float = 10.0) -> np.ndarray:
    """Elementwise complex ratio S_target / S_mix with magnitude clamped.

    Zero mixture bins get a zero mask: nothing can be recovered from them
    and an unbounded ratio would defeat the clamp.
    """
    t = _check_spec(target_spec)
    m = _check_spec(mix_spec)
    if t.shape != m.shape:
        raise DimMismatch(f"target {t.shape} vs mixture {m.shape}")
    mask = np.zeros_like(m)
    live = m != 0
    mask[live] = t[live] / m[live]
    mag = np.abs(mask)
    over = mag > clamp
    mask[over] *= clamp / mag[over]
    return mask


def apply_crm(mix_spec, mask) -> np.ndarray:
    """Apply a complex mask to a mixture spectrogram."""
    m = _check_spec(mix_spec)
    k = _check_spec(mask)
    if m.shape != k.shape:
        raise DimMismatch(f"mixture {m.shape} vs mask {k.shape}")
    return m * k


def export_spectrogram(spec, path) -> None:
    """Write a model-facing FMX1 view: DC dropped, real parts then imaginary.

    Rows = frames, cols = 512 (256 real + 256 imaginary, bins 1..256).
    """
    s = _check_spec(spec)
    body = s[:, 1:]
    write_fmx(path, np.concatenate([body.real, body.imag], axis=1))
