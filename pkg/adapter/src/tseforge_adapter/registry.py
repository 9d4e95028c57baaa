"""Utterance registry TSV parsing (same layout the corpus tooling emits)."""

from dataclasses import dataclass
from pathlib import Path

from .errors import RegistryError

COLUMNS = ("utt_id", "speaker_id", "gender", "path", "duration_s")


@dataclass(frozen=True)
class Utterance:
    utt_id: str
    speaker_id: str
    path: str
    duration_s: float


def load_registry(path) -> list[Utterance]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise RegistryError(f"{path}: {exc}") from exc
    if not lines or tuple(lines[0].split("\t")) != COLUMNS:
        raise RegistryError(f"{path}:1: expected header {'    '.join(COLUMNS)!r}")
    seen: set[str] = set()
    records: list[Utterance] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(COLUMNS):
            raise RegistryError(f"{path}:{lineno}: expected {len(COLUMNS)} fields, got {len(fields)}")
        utt_id, speaker_id, _gender, wav_path, duration = fields
        if utt_id in seen:
            raise RegistryError(f"{path}:{lineno}: duplicate utt_id {utt_id!r}")
        seen.add(utt_id)
        try:
            duration_s = float(duration)
        except ValueError as exc:
            raise RegistryError(f"{path}:{lineno}: bad duration {duration!r}") from exc
        records.append(Utterance(utt_id, speaker_id, wav_path, duration_s))
    if not records:
        raise RegistryError(f"{path}: no utterances")
    return records
