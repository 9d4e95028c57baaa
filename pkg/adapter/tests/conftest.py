import pytest

import adapterhelpers
from adapterhelpers import tone, write_registry, write_wav16


def pytest_terminal_summary(terminalreporter):
    if not adapterhelpers.INTEROP_LINES:
        return
    terminalreporter.section("adapter interop criteria")
    for line in adapterhelpers.INTEROP_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def speech_registry(tmp_path):
    """Two speakers with two one-second utterances each."""
    rows = []
    for spk in range(2):
        for u in range(2):
            name = f"spk{spk}_u{u}"
            wav = write_wav16(tmp_path / f"{name}.wav",
                              tone(1.0, 200 + 60 * spk + 15 * u, seed=spk * 10 + u))
            rows.append(f"{name}\tspk{spk}\tf\t{wav}\t1.0")
    return write_registry(tmp_path / "registry.tsv", rows)
