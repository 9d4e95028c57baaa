"""Evaluation metrics (negative SNR loss, SDR, iSDR) and manifest-level
evaluation reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import Waveform, read_wav
from .errors import LengthMismatch, MissingEstimate, ZeroTarget

EPS = 1e-8
CAP_DB = 60.0


def _ratio_db(s: Waveform, s_hat: Waveform) -> float:
    a = s.samples
    b = s_hat.samples
    if len(a) != len(b):
        raise LengthMismatch(f"target {len(a)} vs estimate {len(b)} samples")
    p_sig = float(np.sum(a * a))
    if p_sig == 0.0:
        raise ZeroTarget("target signal has zero energy")
    err = a - b
    p_err = float(np.sum(err * err))
    return 10.0 * np.log10(p_sig / (p_err + EPS))


def snr_loss(s: Waveform, s_hat: Waveform) -> float:
    """Negative SNR training loss: -10*log10(sum s^2 / (sum (s - s_hat)^2 + eps)).

    Lower is better; a perfect estimate bottoms out at the eps floor.
    """
    return -_ratio_db(s, s_hat)


def sdr(s: Waveform, s_hat: Waveform) -> float:
    """Signal-to-distortion ratio in dB, capped at +60."""
    return min(_ratio_db(s, s_hat), CAP_DB)


def isdr(s: Waveform, s_hat: Waveform, m: Waveform) -> float:
    """SDR improvement of the estimate over the unprocessed mixture."""
    return sdr(s, s_hat) - sdr(s, m)


@dataclass
class ItemEval:
    id: str
    sdr_db: float
    isdr_db: float
    snr_loss_db: float


@dataclass
class EvalReport:
    rows: list[ItemEval] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    cap_db: float = CAP_DB

    @property
    def count(self) -> int:
        return len(self.rows)

    def aggregates(self) -> dict:
        out: dict = {"count": self.count, "missing": len(self.missing)}
        for name in ("sdr_db", "isdr_db", "snr_loss_db"):
            vals = [getattr(r, name) for r in self.rows]
            if vals:
                out[name] = {
                    "mean": float(np.mean(vals)),
                    "median": float(np.median(vals)),
                }
            else:
                out[name] = {"mean": None, "median": None}
        return out

    def to_json_lines(self) -> str:
        lines = [
            json.dumps(
                {
                    "id": r.id,
                    "sdr_db": r.sdr_db,
                    "isdr_db": r.isdr_db,
                    "snr_loss_db": r.snr_loss_db,
                }
            )
            for r in self.rows
        ]
        return "".join(line + "\n" for line in lines)

    def to_csv(self) -> str:
        lines = ["id,sdr_db,isdr_db,snr_loss_db"]
        for r in self.rows:
            lines.append(f"{r.id},{r.sdr_db!r},{r.isdr_db!r},{r.snr_loss_db!r}")
        return "".join(line + "\n" for line in lines)


def read_manifest(path) -> list[dict]:
    """Parse a JSON-lines manifest into a list of entry dicts."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries


def evaluate_manifest(manifest_path, estimates_dir, strict: bool = False) -> EvalReport:
    """Score one estimate WAV per manifest id against targets and mixtures.

    Estimates are looked up as <estimates_dir>/<id>.wav; manifest audio
    paths resolve relative to the manifest's directory. Missing estimates
    are listed in the report, or fatal under strict.
    """
    manifest_path = Path(manifest_path)
    estimates_dir = Path(estimates_dir)
    base = manifest_path.parent
    report = EvalReport()
    for entry in read_manifest(manifest_path):
        item_id = str(entry["id"])
        est_path = estimates_dir / f"{item_id}.wav"
        if not est_path.exists():
            if strict:
                raise MissingEstimate(f"no estimate for item {item_id}: {est_path}")
            report.missing.append(item_id)
            continue
        target = read_wav(base / entry["target_path"])
        mixture = read_wav(base / entry["mixture_path"])
        estimate = read_wav(est_path)
        report.rows.append(
            ItemEval(
                id=item_id,
                sdr_db=sdr(target, estimate),
                isdr_db=isdr(target, estimate, mixture),
                snr_loss_db=snr_loss(target, estimate),
            )
        )
    return report
