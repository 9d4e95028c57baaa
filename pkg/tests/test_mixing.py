import numpy as np
import pytest

from tseforge.audio_io import Waveform
from tseforge.errors import EmptyPool, LengthMismatch, ZeroEnergy
from tseforge.mixing import augment_noise, gain_for_snr, mix


def test_gain_known_powers():
    # P_s = 1, P_s' = 4, snr 0 -> alpha = sqrt(1/4)
    s = Waveform(np.array([1.0, -1.0, 1.0, -1.0]))
    i = Waveform(np.array([2.0, -2.0, 2.0, -2.0]))
    assert gain_for_snr(s, i, 0.0) == pytest.approx(0.5, rel=1e-12)


def test_gain_equal_power_zero_snr_is_unity():
    rng = np.random.default_rng(0)
    x = rng.normal(0, 0.1, 1000)
    assert gain_for_snr(Waveform(x), Waveform(x.copy()), 0.0) == pytest.approx(1.0)


def test_gain_equal_power_ten_db():
    x = np.ones(100) * 0.3
    assert gain_for_snr(Waveform(x), Waveform(x.copy()), 10.0) == pytest.approx(
        10 ** -0.5, rel=1e-12
    )


def test_gain_zero_energy_raises():
    s = Waveform(np.ones(10))
    z = Waveform(np.zeros(10))
    with pytest.raises(ZeroEnergy):
        gain_for_snr(s, z, 0.0)
    with pytest.raises(ZeroEnergy):
        gain_for_snr(z, s, 0.0)


def test_mix_two_sample_example():
    m, spec = mix(Waveform(np.array([1.0, 0.0])), Waveform(np.array([0.0, 1.0])), 0.0)
    assert np.allclose(m.samples, [1.0, 1.0])
    assert spec.alpha == pytest.approx(1.0)
    assert spec.snr_db == 0.0


def test_mix_length_mismatch():
    with pytest.raises(LengthMismatch):
        mix(Waveform(np.ones(10)), Waveform(np.ones(11)), 0.0)


def test_mix_realized_snr_matches_request():
    rng = np.random.default_rng(1)
    for snr in (-5.0, -1.3, 0.0, 2.78, 5.0):
        s = Waveform(rng.normal(0, 0.08, 96000))
        i = Waveform(rng.normal(0, 0.02, 96000))
        m, spec = mix(s, i, snr)
        resid = m.samples - s.samples
        realized = 10 * np.log10(np.sum(s.samples**2) / np.sum(resid**2))
        assert realized == pytest.approx(snr, abs=1e-6)


def test_mix_scale_equivariance():
    rng = np.random.default_rng(2)
    s = rng.normal(0, 0.1, 500)
    i = rng.normal(0, 0.1, 500)
    m1, spec1 = mix(Waveform(s), Waveform(i), 3.0)
    m2, spec2 = mix(Waveform(0.25 * s), Waveform(0.25 * i), 3.0)
    assert spec2.alpha == pytest.approx(spec1.alpha, rel=1e-12)
    assert np.allclose(m2.samples, 0.25 * m1.samples)


def square_wave(n):
    x = np.ones(n)
    x[1::2] = -1.0
    return x


def test_augment_noise_skip_branch_returns_input():
    m = Waveform(square_wave(160))
    pool = [Waveform(square_wave(400))]
    out, spec = augment_noise(m, pool, np.random.default_rng(0), probability=0.0,
                              segment_seconds=0.01)
    assert out is m
    assert not spec.noise_applied


def test_augment_noise_unit_gain_at_zero_snr():
    # both the mixture and every noise window have mean square 1
    m = Waveform(square_wave(160))
    pool = [Waveform(square_wave(400))]
    out, spec = augment_noise(m, pool, np.random.default_rng(3), probability=1.0,
                              snr_low=0.0, snr_high=0.0, segment_seconds=0.01)
    assert spec.noise_applied
    assert spec.noise_gain == pytest.approx(1.0, rel=1e-12)
    assert spec.noise_snr_db == 0.0
    assert not np.array_equal(out.samples, m.samples)


def test_augment_noise_snr_draw_stays_in_range():
    m = Waveform(square_wave(160))
    pool = [Waveform(square_wave(400))]
    for seed in range(50):
        _, spec = augment_noise(m, pool, np.random.default_rng(seed), probability=1.0,
                                segment_seconds=0.01)
        assert -5.0 <= spec.noise_snr_db <= 10.0


def test_augment_noise_application_frequency():
    m = Waveform(square_wave(160))
    pool = [Waveform(square_wave(400))]
    rng = np.random.default_rng(99)
    applied = sum(
        augment_noise(m, pool, rng, segment_seconds=0.01)[1].noise_applied
        for _ in range(10000)
    )
    assert 0.48 <= applied / 10000 <= 0.52


def test_augment_noise_empty_pool():
    with pytest.raises(EmptyPool):
        augment_noise(Waveform(np.ones(10)), [], np.random.default_rng(0))


def test_augment_noise_short_clip_rejected():
    m = Waveform(square_wave(160))
    pool = [Waveform(square_wave(100))]
    with pytest.raises(EmptyPool):
        augment_noise(m, pool, np.random.default_rng(0), segment_seconds=0.01)
