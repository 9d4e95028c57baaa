"""Active speech level (ITU-T P.56 method B) and gain normalization.

Method B tracks a double-smoothed envelope of |x| and counts, for a ladder
of thresholds one octave apart, how many samples sit at or above each
threshold (with a 200 ms hangover). The active level is found where the
level-over-threshold margin crosses 15.9 dB, refined by binary
interpolation. dBov reference: a full-scale square wave (mean square 1.0)
sits at 0 dBov.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from . import _accel
from .audio_io import Waveform
from .errors import SilentInput

SMOOTHING_S = 0.03
HANGOVER_S = 0.2
MARGIN_DB = 15.9
NUM_THRESHOLDS = 15  # one per bit below full scale, 2^-15 .. 2^-1
INTERP_TOL_DB = 0.5


@dataclass
class LevelReport:
    active_level_dbov: float
    activity_factor: float
    gain_applied: float = 1.0


def _bin_interp(upcount, lwcount, upthr, lwthr, margin, tol):
    """Bisect between two (count, threshold) pairs to the margin crossing."""
    if abs(upcount - upthr - margin) < tol:
        return upcount
    if abs(lwcount - lwthr - margin) < tol:
        return lwcount
    midcount = (upcount + lwcount) / 2.0
    midthr = (upthr + lwthr) / 2.0
    iterno = 1
    while True:
        diff = midcount - midthr - margin
        if abs(diff) <= tol:
            return midcount
        iterno += 1
        if iterno > 20:
            tol *= 1.1
        if diff > tol:
            midcount = (upcount + midcount) / 2.0
            midthr = (upthr + midthr) / 2.0
        else:
            midcount = (midcount + lwcount) / 2.0
            midthr = (midthr + lwthr) / 2.0


def active_speech_level(w: Waveform) -> LevelReport:
    """P.56 active level of `w` in dBov plus the measured activity factor.

    Falls back to the long-term level (activity 1.0) for signals so quiet
    or sparse that the margin search has nothing to bracket.
    """
    x = w.samples
    if x.size == 0 or not np.any(x):
        raise SilentInput("active level of an all-zero waveform is undefined")

    fs = w.sample_rate
    sq = float(np.dot(x, x))
    n = x.shape[0]
    long_term_msq = sq / n

    g = math.exp(-1.0 / (fs * SMOOTHING_S))
    env = lfilter([1.0 - g, 0.0], [1.0, -g], np.abs(x))
    env = lfilter([1.0 - g, 0.0], [1.0, -g], env)

    hangover = int(math.ceil(fs * HANGOVER_S))
    thresholds = np.power(2.0, np.arange(NUM_THRESHOLDS, dtype=np.float64) - 15)
    counts = _accel.active_counts(np.ascontiguousarray(env, dtype=np.float64),
                                  thresholds, hangover)

    def fallback():
        return LevelReport(10.0 * math.log10(long_term_msq), 1.0)

    if counts[0] <= 0:
        return fallback()
    a_db = np.where(counts > 0, 10.0 * np.log10(sq / np.maximum(counts, 1)), np.inf)
    c_db = 20.0 * np.log10(thresholds)
    if a_db[0] - c_db[0] < MARGIN_DB:
        return fallback()

    for j in range(1, NUM_THRESHOLDS):
        if counts[j] == 0:
            break
        if a_db[j] - c_db[j] <= MARGIN_DB:
            asl_db = _bin_interp(a_db[j], a_db[j - 1], c_db[j], c_db[j - 1],
                                 MARGIN_DB, INTERP_TOL_DB)
            asl_msq = 10.0 ** (asl_db / 10.0)
            activity = min(1.0, long_term_msq / asl_msq)
            return LevelReport(asl_db, activity)
    return fallback()


def normalize_to(w: Waveform, target_dbov: float = -26.0) -> tuple[Waveform, LevelReport]:
    """Scale `w` so its active level lands on `target_dbov`.

    Returns the scaled waveform and a report holding the input's measured
    level and the single gain that was applied.
    """
    report = active_speech_level(w)
    gain = 10.0 ** ((target_dbov - report.active_level_dbov) / 20.0)
    scaled = Waveform(w.samples * gain, w.sample_rate)
    return scaled, LevelReport(report.active_level_dbov, report.activity_factor, gain)
