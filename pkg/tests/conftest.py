"""Shared fixtures: synthetic registries with real WAV files on disk,
plus a terminal-summary block for the acceptance criteria."""

import numpy as np
import pytest

import tsehelpers
from tsehelpers import make_registry_row, write_registry, write_utt


def pytest_terminal_summary(terminalreporter):
    if tsehelpers.ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in tsehelpers.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def desk_registries(tmp_path):
    """Small target/interferer/noise registries backed by real audio."""
    rng = np.random.default_rng(1234)
    audio = tmp_path / "audio"
    audio.mkdir()
    t_rows, i_rows, n_rows = [], [], []
    for spk in range(3):
        gender = "male" if spk % 2 == 0 else "female"
        for u in range(3):
            name = f"t{spk}_{u}"
            dur = 7.0 + u
            p = write_utt(audio, name, dur, rng, freq=220 + 90 * spk)
            t_rows.append(make_registry_row(name, f"spkT{spk}", gender, p, dur))
    for spk in range(4):
        gender = "male" if spk % 2 == 0 else "female"
        for u in range(2):
            name = f"i{spk}_{u}"
            p = write_utt(audio, name, 8.0, rng)
            i_rows.append(make_registry_row(name, f"spkI{spk}", gender, p, 8.0))
    for k in range(2):
        name = f"n{k}"
        p = write_utt(audio, name, 9.0, rng)
        n_rows.append(make_registry_row(name, f"noise{k}", "male", p, 9.0))
    return {
        "targets": write_registry(tmp_path / "targets.tsv", t_rows),
        "interferers": write_registry(tmp_path / "interferers.tsv", i_rows),
        "noise": write_registry(tmp_path / "noise.tsv", n_rows),
        "tmp_path": tmp_path,
    }
