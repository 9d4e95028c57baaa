"""SNR-controlled two-talker mixing and dynamic noise augmentation.

The mixture is target + alpha * interference, with alpha chosen so the
target-to-interference power ratio hits the requested SNR. Powers are
mean squares over the full mixed extent (padding zeros included), taken
after level normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .audio_io import SAMPLE_RATE, Waveform
from .errors import EmptyPool, LengthMismatch, ZeroEnergy
from .rng import SeededRng


@dataclass
class MixSpec:
    snr_db: float
    alpha: float
    noise_applied: bool = False
    noise_index: int | None = None
    noise_offset: int | None = None
    noise_snr_db: float | None = None
    noise_gain: float | None = None


def _power(x: np.ndarray) -> float:
    return float(np.mean(np.square(x))) if x.size else 0.0


def gain_for_snr(target: Waveform, interference: Waveform, snr_db: float) -> float:
    """Scale for the interference so 10*log10(P_s / (a^2 P_i)) == snr_db."""
    n = min(len(target), len(interference))
    p_s = _power(target.samples[:n])
    p_i = _power(interference.samples[:n])
    if p_s <= 0.0:
        raise ZeroEnergy("target carries no energy over the mixed extent")
    if p_i <= 0.0:
        raise ZeroEnergy("interference carries no energy over the mixed extent")
    return math.sqrt(p_s / (p_i * 10.0 ** (snr_db / 10.0)))


def mix(target: Waveform, interference: Waveform, snr_db: float) -> tuple[Waveform, MixSpec]:
    """Sum target and scaled interference sample-wise at the requested SNR."""
    if len(target) != len(interference):
        raise LengthMismatch(f"target {len(target)} vs interference {len(interference)} samples")
    alpha = gain_for_snr(target, interference, snr_db)
    m = Waveform(target.samples + alpha * interference.samples, target.sample_rate)
    return m, MixSpec(snr_db=snr_db, alpha=alpha)


def augment_noise(
    m: Waveform,
    noise_pool: list[Waveform],
    rng: SeededRng,
    probability: float = 0.5,
    snr_low: float = -5.0,
    snr_high: float = 10.0,
    segment_seconds: float = 6.0,
) -> tuple[Waveform, MixSpec]:
    """Add a random noise window to the mixture with the given probability.

    Draw order is fixed: apply decision, clip index, window offset, SNR.
    The returned spec carries only the noise fields (snr_db/alpha are not
    meaningful here and are set to 0/1).
    """
    if not noise_pool:
        raise EmptyPool("noise pool is empty")
    win_len = max(len(m), int(round(segment_seconds * SAMPLE_RATE)))
    for i, clip in enumerate(noise_pool):
        if len(clip) < win_len:
            raise EmptyPool(f"noise clip {i} shorter than the {win_len}-sample window")

    spec = MixSpec(snr_db=0.0, alpha=1.0, noise_applied=False)
    if rng.random() >= probability:
        return m, spec

    idx = int(rng.integers(0, len(noise_pool)))
    clip = noise_pool[idx]
    offset = int(rng.integers(0, len(clip) - win_len + 1))
    snr_db = float(rng.uniform(snr_low, snr_high))

    window = clip.samples[offset : offset + len(m)]
    p_m = _power(m.samples)
    p_n = _power(window)
    if p_m <= 0.0 or p_n <= 0.0:
        raise ZeroEnergy("mixture or noise window carries no energy")
    gain = math.sqrt(p_m / (p_n * 10.0 ** (snr_db / 10.0)))
    noisy = Waveform(m.samples + gain * window, m.sample_rate)
    return noisy, replace(
        spec, noise_applied=True, noise_index=idx, noise_offset=offset,
        noise_snr_db=snr_db, noise_gain=gain,
    )
