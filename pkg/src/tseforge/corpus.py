"""Registry ingestion, filtering, gender-alternating pair planning, and
deterministic (mixture, reference, target) triplet emission.

Every item draws all randomness from its own counter-based stream seeded
by (global_seed, target utt_id, interferer utt_id), so corpus output is
byte-identical regardless of worker count or scheduling.
"""

from __future__ import annotations

import json
import logging
import wave
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import SAMPLE_RATE, Waveform, build_reference, read_wav, segment, write_wav
from .errors import (
    CorpusError,
    DuplicateId,
    EmptyResult,
    MissingGender,
    ParseError,
)
from .level import normalize_to
from .mixing import augment_noise, mix
from .rng import SeededRng, derive_seed, make_rng

log = logging.getLogger(__name__)

GENDERS = ("male", "female")
REGISTRY_COLUMNS = ("utt_id", "speaker_id", "gender", "path", "duration_s")


@dataclass
class UtteranceRecord:
    utt_id: str
    speaker_id: str
    gender: str
    path: str
    duration_s: float


@dataclass
class Registry:
    records: list[UtteranceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def by_speaker(self) -> dict[str, list[UtteranceRecord]]:
        out: dict[str, list[UtteranceRecord]] = {}
        for rec in self.records:
            out.setdefault(rec.speaker_id, []).append(rec)
        return out

    def genders(self) -> set[str]:
        return {rec.gender for rec in self.records}


def load_registry(path) -> Registry:
    """Parse a TSV registry with header utt_id/speaker_id/gender/path/duration_s."""
    path = Path(path)
    records: list[UtteranceRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").rstrip("\r")
        if tuple(header.split("\t")) != REGISTRY_COLUMNS:
            raise ParseError(f"{path}:1: header must be {' '.join(REGISTRY_COLUMNS)}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != len(REGISTRY_COLUMNS):
                raise ParseError(f"{path}:{lineno}: expected {len(REGISTRY_COLUMNS)} columns, got {len(cols)}")
            utt_id, speaker_id, gender, wav_path, dur = cols
            if gender not in GENDERS:
                raise ParseError(f"{path}:{lineno}: gender must be male or female, got {gender!r}")
            try:
                duration_s = float(dur)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad duration {dur!r}") from None
            if not duration_s > 0:
                raise ParseError(f"{path}:{lineno}: duration must be positive, got {dur}")
            if utt_id in seen:
                raise DuplicateId(f"{path}:{lineno}: duplicate utt_id {utt_id!r}")
            seen.add(utt_id)
            records.append(UtteranceRecord(utt_id, speaker_id, gender, wav_path, duration_s))
    return Registry(records)


@dataclass
class FilterReport:
    utterances_in: int
    utterances_dropped_short: int
    speakers_in: int
    speakers_dropped_few: int
    utterances_out: int
    speakers_out: int


def filter_targets(
    reg: Registry, min_duration_s: float = 2.0, min_utterances: int = 3
) -> tuple[Registry, FilterReport]:
    """Drop short utterances, then speakers left with too few of them."""
    speakers_in = len(reg.by_speaker())
    kept = [r for r in reg if r.duration_s >= min_duration_s]
    dropped_short = len(reg) - len(kept)

    per_speaker: dict[str, int] = {}
    for rec in kept:
        per_speaker[rec.speaker_id] = per_speaker.get(rec.speaker_id, 0) + 1
    survivors = {s for s, n in per_speaker.items() if n >= min_utterances}
    out = [r for r in kept if r.speaker_id in survivors]
    if not out:
        raise EmptyResult("no utterances survive filtering")
    report = FilterReport(
        utterances_in=len(reg),
        utterances_dropped_short=dropped_short,
        speakers_in=speakers_in,
        speakers_dropped_few=speakers_in - len(survivors),
        utterances_out=len(out),
        speakers_out=len(survivors),
    )
    return Registry(out), report


@dataclass
class PairItem:
    index: int
    target: UtteranceRecord
    interferer: UtteranceRecord


@dataclass
class PairPlan:
    items: list[PairItem]
    targets: Registry

    def __len__(self) -> int:
        return len(self.items)


def plan_pairs(targets: Registry, interferers: Registry, rng: SeededRng) -> PairPlan:
    """Pair each target utterance with an interferer of alternating gender.

    The k-th pairing (0-based) draws uniformly among male utterances when k
    is even, female when k is odd, never from the target's own speaker.
    """
    if len(targets) == 0:
        raise EmptyResult("target registry is empty")
    pools = {g: [r for r in interferers if r.gender == g] for g in GENDERS}
    for g in GENDERS:
        if not pools[g]:
            raise MissingGender(f"interferer registry has no {g} utterances")
    items = []
    for k, target in enumerate(targets):
        pool = [r for r in pools[GENDERS[k % 2]] if r.speaker_id != target.speaker_id]
        if not pool:
            raise CorpusError(
                f"no {GENDERS[k % 2]} interferer outside speaker {target.speaker_id}"
            )
        items.append(PairItem(k, target, pool[int(rng.integers(0, len(pool)))]))
    return PairPlan(items, targets)


@dataclass
class CorpusConfig:
    global_seed: int = 0
    workers: int = 1
    level_dbov: float = -26.0
    segment_seconds: float = 6.0
    snr_low: float = -5.0
    snr_high: float = 5.0
    noise_registry: Registry | None = None
    noise_prob: float = 0.5
    noise_snr_low: float = -5.0
    noise_snr_high: float = 10.0

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.segment_seconds <= 0:
            raise ValueError("segment_seconds must be positive")
        if self.snr_low > self.snr_high:
            raise ValueError("snr_low must not exceed snr_high")
        if self.noise_snr_low > self.noise_snr_high:
            raise ValueError("noise_snr_low must not exceed noise_snr_high")
        if not 0.0 <= self.noise_prob <= 1.0:
            raise ValueError("noise_prob must lie in [0, 1]")


@dataclass
class ManifestEntry:
    id: str
    mixture_path: str
    target_path: str
    reference_path: str
    target_speaker: str
    interference_speaker: str
    interference_gender: str
    snr_db: float
    alpha: float
    item_seed: int
    noise_path: str | None = None
    noise_snr_db: float | None = None

    def to_json(self) -> str:
        d = {
            "id": self.id,
            "mixture_path": self.mixture_path,
            "target_path": self.target_path,
            "reference_path": self.reference_path,
            "target_speaker": self.target_speaker,
            "interference_speaker": self.interference_speaker,
            "interference_gender": self.interference_gender,
            "snr_db": self.snr_db,
            "alpha": self.alpha,
            "item_seed": self.item_seed,
        }
        if self.noise_path is not None:
            d["noise_path"] = self.noise_path
            d["noise_snr_db"] = self.noise_snr_db
        return json.dumps(d)


@dataclass
class Manifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for entry in self.entries:
                fh.write(entry.to_json() + "\n")

    @classmethod
    def read(cls, path) -> "Manifest":
        entries = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append(ManifestEntry(**json.loads(line)))
        return cls(entries)

    def stats(self, base_dir=None) -> dict:
        """Manifest-level statistics: SNR spread, gender balance, durations."""
        snrs = np.array([e.snr_db for e in self.entries], dtype=np.float64)
        genders: dict[str, int] = {}
        for e in self.entries:
            genders[e.interference_gender] = genders.get(e.interference_gender, 0) + 1
        out = {
            "items": len(self.entries),
            "interference_gender": genders,
            "with_noise": sum(1 for e in self.entries if e.noise_path is not None),
        }
        if len(snrs):
            hist, edges = np.histogram(snrs, bins=10, range=(snrs.min(), snrs.max()))
            out["snr_db"] = {
                "mean": float(snrs.mean()),
                "min": float(snrs.min()),
                "max": float(snrs.max()),
                "histogram": {"counts": hist.tolist(), "edges": edges.tolist()},
            }
        if base_dir is not None:
            total = 0
            for e in self.entries:
                with wave.open(str(Path(base_dir) / e.mixture_path), "rb") as fh:
                    total += fh.getnframes()
            out["mixture_seconds_total"] = total / SAMPLE_RATE
        return out


def _load_normalized(path, level_dbov: float) -> Waveform:
    w, _ = normalize_to(read_wav(path), level_dbov)
    return w


_NOISE_CACHE: dict[tuple[str, ...], list[Waveform]] = {}


def _noise_pool(paths: tuple[str, ...]) -> list[Waveform]:
    if paths not in _NOISE_CACHE:
        _NOISE_CACHE[paths] = [read_wav(p) for p in paths]
    return _NOISE_CACHE[paths]


def _build_item(
    item: PairItem, siblings: list[UtteranceRecord], cfg: CorpusConfig, out_dir: str
) -> ManifestEntry:
    """Build one triplet. Fixed draw order: target grid offset, target
    segment pick, interferer grid offset, interferer pick, SNR, reference
    shuffle, then optional noise draws."""
    item_id = f"{item.index:06d}_{item.target.utt_id}"
    item_seed = derive_seed(cfg.global_seed, item.target.utt_id, item.interferer.utt_id)
    rng = make_rng(item_seed)
    out = Path(out_dir)
    rel = {k: f"{k}/{item_id}.wav" for k in ("mix", "target", "ref")}
    written: list[Path] = []
    try:
        t_segs = segment(_load_normalized(item.target.path, cfg.level_dbov), cfg.segment_seconds, rng)
        t_seg = t_segs[int(rng.integers(0, len(t_segs)))]
        i_segs = segment(_load_normalized(item.interferer.path, cfg.level_dbov), cfg.segment_seconds, rng)
        i_seg = i_segs[int(rng.integers(0, len(i_segs)))]

        snr_db = float(rng.uniform(cfg.snr_low, cfg.snr_high))
        mixture, spec = mix(t_seg, i_seg, snr_db)

        ref_waves = [_load_normalized(s.path, cfg.level_dbov) for s in siblings]
        reference = build_reference(ref_waves, rng)

        noise_path = None
        noise_snr_db = None
        if cfg.noise_registry is not None and len(cfg.noise_registry) > 0:
            paths = tuple(r.path for r in cfg.noise_registry)
            mixture, nspec = augment_noise(
                mixture,
                _noise_pool(paths),
                rng,
                probability=cfg.noise_prob,
                snr_low=cfg.noise_snr_low,
                snr_high=cfg.noise_snr_high,
                segment_seconds=cfg.segment_seconds,
            )
            if nspec.noise_applied:
                noise_path = paths[nspec.noise_index]
                noise_snr_db = nspec.noise_snr_db

        for key, w in (("mix", mixture), ("target", t_seg), ("ref", reference)):
            dest = out / rel[key]
            clip = write_wav(dest, w)
            written.append(dest)
            if clip.clipped:
                log.debug("item %s: %d samples clipped in %s", item_id, clip.clipped, key)
    except Exception as exc:
        for p in written:
            p.unlink(missing_ok=True)
        msg = f"item {item_id} ({item.target.utt_id} x {item.interferer.utt_id}): {exc}"
        try:
            raise type(exc)(msg) from exc
        except TypeError:
            raise CorpusError(msg) from exc

    return ManifestEntry(
        id=item_id,
        mixture_path=rel["mix"],
        target_path=rel["target"],
        reference_path=rel["ref"],
        target_speaker=item.target.speaker_id,
        interference_speaker=item.interferer.speaker_id,
        interference_gender=item.interferer.gender,
        snr_db=spec.snr_db,
        alpha=spec.alpha,
        item_seed=item_seed,
        noise_path=noise_path,
        noise_snr_db=noise_snr_db,
    )


def build_corpus(plan: PairPlan, cfg: CorpusConfig, out_dir) -> Manifest:
    """Emit triplet WAVs and a manifest for every plan item.

    Items are independent; with workers > 1 they run in a process pool and
    the manifest is assembled in plan order regardless of completion order.
    A failing item removes its own partial files before the error surfaces.
    """
    out = Path(out_dir)
    for sub in ("mix", "target", "ref"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    by_speaker = plan.targets.by_speaker()
    jobs = []
    for item in plan.items:
        siblings = [
            u for u in by_speaker.get(item.target.speaker_id, []) if u.utt_id != item.target.utt_id
        ]
        if not siblings:
            raise CorpusError(
                f"speaker {item.target.speaker_id} has no reference material "
                f"besides the mixture utterance {item.target.utt_id}"
            )
        jobs.append((item, siblings))

    if cfg.workers == 1 or len(jobs) <= 1:
        entries = [_build_item(item, sib, cfg, str(out)) for item, sib in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_build_item, item, sib, cfg, str(out)) for item, sib in jobs]
            entries = [f.result() for f in futures]
    return Manifest(entries)
