"""Extraction jobs: registries in, FMX1 files plus a sidecar manifest out.

A job keeps going when one utterance's audio fails (the failure lands in the
log and in the manifest); only model construction and registry problems abort
the whole run.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AudioError
from .fmx import atomic_write_bytes, write_fmx
from .dsp import read_wav16k
from .models import EMBEDDING_DIM, load_model
from .registry import load_registry

log = logging.getLogger("tseforge_adapter")


@dataclass
class ExtractionJob:
    registry: str
    out_dir: str
    model: str = "builtin-dsp"
    layer: int = 3


@dataclass
class JobReport:
    out_dir: str
    written: dict[str, str] = field(default_factory=dict)  # utt_id -> file name
    failures: dict[str, str] = field(default_factory=dict)  # utt_id -> reason

    @property
    def ok(self) -> int:
        return len(self.written)


def _check_layer(model, layer: int) -> None:
    if not 0 <= layer <= model.max_layer:
        raise ValueError(f"layer {layer} out of range 0..{model.max_layer} for {model.name}")


def _write_manifest(out: Path, kind: str, job: ExtractionJob, dim: int, report: JobReport, extra: dict) -> None:
    manifest = {
        "kind": kind,
        "model": job.model,
        "layer": job.layer,
        "dim": dim,
        **extra,
        "items": {
            utt: {"file": name, "model": job.model, "layer": job.layer}
            for utt, name in report.written.items()
        },
        "failures": report.failures,
    }
    atomic_write_bytes(out / "manifest.json", (json.dumps(manifest, indent=2) + "\n").encode())


def extract_embeddings(job: ExtractionJob) -> JobReport:
    """One 1x192 FMX1 per speaker: the mean of its utterance embeddings,
    renormalized to unit length."""
    model = load_model(job.model)
    _check_layer(model, job.layer)
    records = load_registry(job.registry)
    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = JobReport(out_dir=str(out))

    per_speaker: dict[str, list[np.ndarray]] = {}
    contributors: dict[str, list[str]] = {}
    for rec in records:
        try:
            emb = model.embed(model.frames(read_wav16k(rec.path), job.layer))
        except AudioError as exc:
            log.warning("skipping %s: %s", rec.utt_id, exc)
            report.failures[rec.utt_id] = str(exc)
            continue
        per_speaker.setdefault(rec.speaker_id, []).append(emb)
        contributors.setdefault(rec.speaker_id, []).append(rec.utt_id)

    for speaker, embs in per_speaker.items():
        mean = np.mean(embs, axis=0)
        norm = np.linalg.norm(mean)
        if norm > 0.0:
            mean = mean / norm
        name = f"{speaker}.fmx"
        write_fmx(out / name, mean[np.newaxis, :])
        for utt in contributors[speaker]:
            report.written[utt] = name

    _write_manifest(out, "embeddings", job, EMBEDDING_DIM, report, {"unit_norm": True})
    return report


def extract_frame_features(job: ExtractionJob) -> JobReport:
    """One TxD FMX1 per utterance from the model's chosen layer."""
    model = load_model(job.model)
    _check_layer(model, job.layer)
    records = load_registry(job.registry)
    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = JobReport(out_dir=str(out))

    for rec in records:
        try:
            feats = model.frames(read_wav16k(rec.path), job.layer)
        except AudioError as exc:
            log.warning("skipping %s: %s", rec.utt_id, exc)
            report.failures[rec.utt_id] = str(exc)
            continue
        name = f"{rec.utt_id}.fmx"
        write_fmx(out / name, feats)
        report.written[rec.utt_id] = name

    _write_manifest(out, "frames", job, model.frame_dim, report, {})
    return report
