import numpy as np
import pytest

from tseforge.audio_io import SAMPLE_RATE, Waveform
from tseforge.errors import DimMismatch, TooShort
from tseforge.features import read_fmx
from tseforge.spectral import (
    HOP,
    N_BINS,
    N_FFT,
    apply_crm,
    export_spectrogram,
    ideal_crm,
    istft,
    stft,
)


def noise(seconds=1.0, seed=0, scale=0.1):
    rng = np.random.default_rng(seed)
    return Waveform(rng.normal(0, scale, int(seconds * SAMPLE_RATE)))


def test_stft_shape_is_ceil_of_hops():
    for n in (512, 16000, 16001, 96000, 12345):
        w = Waveform(np.zeros(n))
        assert stft(w).shape == (-(-n // HOP), N_BINS)


def test_stft_rejects_short_input():
    with pytest.raises(TooShort):
        stft(Waveform(np.zeros(N_FFT - 1)))


def test_pure_tone_concentrates_at_its_bin():
    t = np.arange(SAMPLE_RATE) / SAMPLE_RATE
    w = Waveform(0.1 * np.sin(2 * np.pi * 1000 * t))
    mag = np.abs(stft(w)[10:-10])  # interior frames, away from edge padding
    per_bin = (mag**2).sum(axis=0)
    assert per_bin.argmax() == 1000 * N_FFT // SAMPLE_RATE  # bin 32
    assert per_bin[30:35].sum() / per_bin.sum() > 0.99


def test_zero_input_zero_spectrogram():
    assert np.all(stft(Waveform(np.zeros(SAMPLE_RATE))) == 0)


def test_dc_offset_lands_in_bin_zero():
    w = Waveform(np.full(SAMPLE_RATE, 0.1))
    per_bin = (np.abs(stft(w)[5:-5]) ** 2).sum(axis=0)
    assert per_bin.argmax() == 0
    # Hann leakage puts 20% of the energy in bin 1; beyond that, nothing
    assert per_bin[:2].sum() / per_bin.sum() > 0.999999


def test_roundtrip_error_below_minus_60_db():
    w = noise(1.0)
    back = istft(stft(w), len(w))
    err = np.sum((back.samples - w.samples) ** 2)
    assert 10 * np.log10(err / np.sum(w.samples**2)) < -60


def test_roundtrip_rms_relative_error():
    for n in (512, 700, 16000, 16001):
        w = noise(seed=n, seconds=n / SAMPLE_RATE)
        back = istft(stft(w), len(w))
        rel = np.sqrt(np.mean((back.samples - w.samples) ** 2) / np.mean(w.samples**2))
        assert rel <= 1e-6


def test_istft_of_zero_spectrogram_is_zero():
    out = istft(np.zeros((20, N_BINS), dtype=complex), 1000)
    assert np.all(out.samples == 0)
    assert len(out) == 1000


def test_linearity():
    a, b = noise(seed=1), noise(seed=2)
    sa, sb = stft(a), stft(b)
    both = stft(Waveform(a.samples + b.samples))
    assert np.allclose(both, sa + sb, atol=1e-12)
    assert np.allclose(istft(3.0 * sa, len(a)).samples, 3.0 * istft(sa, len(a)).samples,
                       atol=1e-12)


def test_parseval_with_window_accounting():
    w = noise(seed=3)
    spec = stft(w)
    weights = np.full(N_BINS, 2.0)
    weights[0] = weights[-1] = 1.0
    spectral_energy = float(np.sum(weights * np.abs(spec) ** 2)) / N_FFT
    # recompute windowed-frame energy from the public framing contract
    from scipy.signal import get_window

    win = get_window("hann", N_FFT, fftbins=True)
    padded = np.pad(w.samples, N_FFT // 2, mode="reflect")
    frame_energy = sum(
        float(np.sum((padded[t * HOP : t * HOP + N_FFT] * win) ** 2))
        for t in range(spec.shape[0])
    )
    assert spectral_energy == pytest.approx(frame_energy, rel=1e-6)


def test_istft_rejects_bad_dims():
    with pytest.raises(DimMismatch):
        istft(np.zeros((10, N_BINS - 1), dtype=complex), 100)
    with pytest.raises(DimMismatch):
        istft(np.zeros((10, N_BINS), dtype=complex), 10**6)


def test_crm_identity_when_target_equals_mix():
    s = stft(noise(seed=4))
    mask = ideal_crm(s, s)
    assert np.allclose(mask, 1.0 + 0.0j, atol=1e-12)


def test_crm_zero_target_gives_zero_mask():
    s = stft(noise(seed=5))
    assert np.all(ideal_crm(np.zeros_like(s), s) == 0)


def test_crm_magnitude_clamped():
    mix_spec = np.full((4, N_BINS), 1e-6 + 0j)
    target_spec = np.full((4, N_BINS), 1.0 + 1.0j)
    mask = ideal_crm(target_spec, mix_spec, clamp=10.0)
    assert np.abs(mask).max() == pytest.approx(10.0)
    # phase preserved under the clamp
    assert np.allclose(np.angle(mask), np.pi / 4)


def test_crm_zero_mix_bins_masked_to_zero():
    t = np.ones((2, N_BINS), dtype=complex)
    m = np.ones((2, N_BINS), dtype=complex)
    m[0, 5] = 0
    mask = ideal_crm(t, m)
    assert mask[0, 5] == 0
    assert mask[1, 5] == 1


def test_crm_shape_checks():
    a = np.zeros((3, N_BINS), dtype=complex)
    b = np.zeros((4, N_BINS), dtype=complex)
    with pytest.raises(DimMismatch):
        ideal_crm(a, b)
    with pytest.raises(DimMismatch):
        apply_crm(a, b)


def test_oracle_mask_reconstruction_sdr():
    rng = np.random.default_rng(6)
    t = np.arange(SAMPLE_RATE) / SAMPLE_RATE
    target = Waveform(0.1 * np.sin(2 * np.pi * 350 * t) + rng.normal(0, 0.01, len(t)))
    interf = Waveform(rng.normal(0, 0.1, len(t)))
    mixture = Waveform(target.samples + interf.samples)
    mask = ideal_crm(stft(target), stft(mixture))
    estimate = istft(apply_crm(stft(mixture), mask), len(mixture))
    err = np.sum((estimate.samples - target.samples) ** 2)
    sdr = 10 * np.log10(np.sum(target.samples**2) / err)
    assert sdr >= 50.0


def test_export_drops_dc_and_splits_parts(tmp_path):
    spec = stft(noise(seed=7, seconds=0.1))
    path = tmp_path / "spec.fmx"
    export_spectrogram(spec, path)
    out = read_fmx(path)
    assert out.shape == (spec.shape[0], 2 * (N_BINS - 1))
    assert np.allclose(out[:, :256], spec[:, 1:].real, atol=1e-6)
    assert np.allclose(out[:, 256:], spec[:, 1:].imag, atol=1e-6)
