import json

import numpy as np
import pytest

from tseforge.audio_io import Waveform, write_wav
from tseforge.errors import LengthMismatch, MissingEstimate, ZeroTarget
from tseforge.metrics import (
    CAP_DB,
    EvalReport,
    ItemEval,
    evaluate_manifest,
    isdr,
    sdr,
    snr_loss,
)


def wf(values):
    return Waveform(np.asarray(values, dtype=np.float64))


def test_snr_loss_zero_estimate_is_zero_db():
    s = wf(np.random.default_rng(0).normal(0, 0.1, 16000))
    assert snr_loss(s, wf(np.zeros(16000))) == pytest.approx(0.0, abs=1e-6)


def test_snr_loss_perfect_estimate_hits_eps_floor():
    s = wf(np.random.default_rng(1).normal(0, 0.1, 16000))
    assert snr_loss(s, wf(s.samples.copy())) <= -60.0


def test_snr_loss_hand_case():
    assert snr_loss(wf([1.0, 0.0]), wf([0.5, 0.0])) == pytest.approx(-6.0206, abs=1e-4)


def test_sdr_hand_case():
    assert sdr(wf([1.0, 0.0]), wf([0.5, 0.0])) == pytest.approx(6.0206, abs=1e-4)


def test_sdr_perfect_estimate_capped():
    s = wf(np.random.default_rng(2).normal(0, 0.1, 16000))
    assert sdr(s, wf(s.samples.copy())) == CAP_DB


def test_sdr_double_estimate_is_zero():
    s = wf(np.random.default_rng(3).normal(0, 0.1, 16000))
    assert sdr(s, wf(2 * s.samples)) == pytest.approx(0.0, abs=1e-6)


def test_sdr_sign_identity_with_snr_loss():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        s = wf(rng.normal(0, 0.1, 64))
        e = wf(rng.normal(0, 0.1, 64))
        val = sdr(s, e)
        if val < CAP_DB:
            assert abs(val + snr_loss(s, e)) <= 1e-9


def test_isdr_mixture_estimate_is_exactly_zero():
    rng = np.random.default_rng(5)
    s = wf(rng.normal(0, 0.1, 8000))
    m = wf(s.samples + rng.normal(0, 0.05, 8000))
    assert isdr(s, wf(m.samples.copy()), m) == 0.0


def test_isdr_hand_case():
    s, m, est = wf([1.0, 0.0]), wf([1.0, 1.0]), wf([1.0, 0.5])
    assert isdr(s, est, m) == pytest.approx(6.0206, abs=1e-4)


def test_isdr_perfect_estimate_is_cap_minus_mix_sdr():
    rng = np.random.default_rng(6)
    s = wf(rng.normal(0, 0.1, 8000))
    m = wf(s.samples + rng.normal(0, 0.05, 8000))
    assert isdr(s, wf(s.samples.copy()), m) == pytest.approx(CAP_DB - sdr(s, m), abs=1e-9)


def test_metric_errors():
    with pytest.raises(LengthMismatch):
        sdr(wf([1.0, 0.0]), wf([1.0]))
    with pytest.raises(ZeroTarget):
        sdr(wf([0.0, 0.0]), wf([1.0, 0.0]))


def make_manifest(tmp_path, n_items=3):
    rng = np.random.default_rng(7)
    (tmp_path / "target").mkdir()
    (tmp_path / "mix").mkdir()
    lines = []
    for i in range(n_items):
        item = f"{i:03d}"
        s = rng.normal(0, 0.05, 16000)
        m = s + rng.normal(0, 0.03, 16000)
        write_wav(tmp_path / "target" / f"{item}.wav", Waveform(s))
        write_wav(tmp_path / "mix" / f"{item}.wav", Waveform(m))
        lines.append(json.dumps({
            "id": item,
            "target_path": f"target/{item}.wav",
            "mixture_path": f"mix/{item}.wav",
        }))
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text("".join(line + "\n" for line in lines))
    return manifest


def test_evaluate_mixture_estimates_score_zero_isdr(tmp_path):
    manifest = make_manifest(tmp_path)
    est = tmp_path / "est"
    est.mkdir()
    for p in (tmp_path / "mix").iterdir():
        (est / p.name).write_bytes(p.read_bytes())
    report = evaluate_manifest(manifest, est)
    assert report.count == 3
    assert not report.missing
    agg = report.aggregates()
    assert agg["isdr_db"]["mean"] == pytest.approx(0.0, abs=1e-12)


def test_evaluate_target_estimates_hit_cap(tmp_path):
    manifest = make_manifest(tmp_path)
    est = tmp_path / "est"
    est.mkdir()
    for p in (tmp_path / "target").iterdir():
        (est / p.name).write_bytes(p.read_bytes())
    report = evaluate_manifest(manifest, est)
    for row in report.rows:
        assert row.sdr_db == CAP_DB


def test_evaluate_lists_missing_estimates(tmp_path):
    manifest = make_manifest(tmp_path)
    est = tmp_path / "est"
    est.mkdir()
    (est / "000.wav").write_bytes((tmp_path / "mix" / "000.wav").read_bytes())
    report = evaluate_manifest(manifest, est)
    assert report.count == 1
    assert report.missing == ["001", "002"]
    with pytest.raises(MissingEstimate):
        evaluate_manifest(manifest, est, strict=True)


def test_report_serialization_roundtrip():
    report = EvalReport(rows=[ItemEval("a", 1.5, 0.5, -1.5), ItemEval("b", 2.0, 1.0, -2.0)])
    lines = report.to_json_lines().splitlines()
    assert [json.loads(l)["id"] for l in lines] == ["a", "b"]
    csv = report.to_csv().splitlines()
    assert csv[0] == "id,sdr_db,isdr_db,snr_loss_db"
    assert len(csv) == 3
    agg = report.aggregates()
    assert agg["sdr_db"]["mean"] == pytest.approx(1.75)
    assert agg["count"] == 2
