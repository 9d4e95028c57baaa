"""Command-line entry point for the corpus pipeline.

Subcommands: build-corpus, augment-noise, salt-interp, plan-curriculum,
schedule, evaluate, inspect. Exit codes: 0 success, 1 validation error
(bad flags or malformed inputs), 2 runtime error. All randomness flows
from --seed; --workers never changes outputs. Set TSE_FORGE_LOG to a
logging level name for verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shutil
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .audio_io import read_wav, write_wav
from .corpus import (
    CorpusConfig,
    Manifest,
    REGISTRY_COLUMNS,
    build_corpus,
    filter_targets,
    load_registry,
    plan_pairs,
)
from .curriculum import (
    CurriculumPlan,
    annotate_similarity,
    partition_stages,
    schedule_batches,
    stage4_alternation,
)
from .errors import (
    BadMagic,
    DimensionOverflow,
    DimMismatch,
    DuplicateId,
    EmptyResult,
    EmptyStage,
    MissingEmbedding,
    MissingGender,
    ParseError,
    PoolTooSmall,
    ToolkitError,
    TruncatedFile,
    UnknownPool,
    ZeroVector,
)
from .features import MAGIC, SaltConfig, read_fmx, salt_interpolate, write_fmx
from .metrics import evaluate_manifest
from .mixing import augment_noise
from .rng import item_rng

log = logging.getLogger(__name__)

_VALIDATION_ERRORS = (
    ValueError,
    ParseError,
    DuplicateId,
    MissingGender,
    EmptyResult,
    EmptyStage,
    UnknownPool,
    MissingEmbedding,
    BadMagic,
    TruncatedFile,
    DimensionOverflow,
    DimMismatch,
    ZeroVector,
    PoolTooSmall,
)


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(args, payload: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2))
    else:
        for line in lines:
            print(line)


def _echo_config(out_dir: Path, args, command: str) -> None:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "json")}
    cfg["command"] = command
    cfg["version"] = __version__
    path = out_dir / "config.json"
    path.write_text(json.dumps(cfg, indent=2, default=str) + "\n", encoding="utf-8")


def cmd_build_corpus(args) -> None:
    targets = load_registry(args.targets)
    filter_report = None
    if args.filter:
        targets, filter_report = filter_targets(targets)
    interferers = load_registry(args.interferers)
    noise_reg = load_registry(args.noise_registry) if args.noise_registry else None
    cfg = CorpusConfig(
        global_seed=args.seed,
        workers=args.workers,
        level_dbov=args.level,
        segment_seconds=args.segment_seconds,
        snr_low=args.snr_low,
        snr_high=args.snr_high,
        noise_registry=noise_reg,
        noise_prob=args.noise_prob,
        noise_snr_low=args.noise_snr_low,
        noise_snr_high=args.noise_snr_high,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _echo_config(out, args, "build-corpus")
    plan = plan_pairs(targets, interferers, item_rng(args.seed, "plan"))
    manifest = build_corpus(plan, cfg, out)
    manifest_path = out / "manifest.jsonl"
    manifest.write(manifest_path)
    payload = {"items": len(manifest), "out": str(out), "manifest": str(manifest_path)}
    lines = [f"built {len(manifest)} triplets under {out}"]
    if filter_report is not None:
        payload["filter"] = asdict(filter_report)
        lines.append(
            f"filtering kept {filter_report.speakers_out}/{filter_report.speakers_in} "
            f"speakers, {filter_report.utterances_out}/{filter_report.utterances_in} utterances"
        )
    _emit(args, payload, lines)


def cmd_augment_noise(args) -> None:
    manifest_path = Path(args.manifest)
    base = manifest_path.parent
    manifest = Manifest.read(manifest_path)
    noise_reg = load_registry(args.noise_registry)
    if len(noise_reg) == 0:
        raise EmptyResult("noise registry is empty")
    noise_paths = tuple(r.path for r in noise_reg)
    pool = [read_wav(p) for p in noise_paths]
    out = Path(args.out)
    for sub in ("mix", "target", "ref"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    _echo_config(out, args, "augment-noise")
    applied = 0
    for entry in manifest.entries:
        rng = item_rng(args.seed, "noise", entry.id)
        mixture = read_wav(base / entry.mixture_path)
        noisy, spec = augment_noise(
            mixture,
            pool,
            rng,
            probability=args.prob,
            snr_low=args.snr_low,
            snr_high=args.snr_high,
            segment_seconds=args.segment_seconds,
        )
        write_wav(out / entry.mixture_path, noisy)
        for rel in (entry.target_path, entry.reference_path):
            shutil.copyfile(base / rel, out / rel)
        if spec.noise_applied:
            entry.noise_path = noise_paths[spec.noise_index]
            entry.noise_snr_db = spec.noise_snr_db
            applied += 1
    new_manifest = out / "manifest.jsonl"
    manifest.write(new_manifest)
    _emit(
        args,
        {"items": len(manifest), "noise_applied": applied, "manifest": str(new_manifest)},
        [f"augmented {applied}/{len(manifest)} mixtures into {out}"],
    )


def cmd_salt_interp(args) -> None:
    query = read_fmx(args.query)
    pools = [read_fmx(p) for p in args.pools]
    cfg = SaltConfig(k=args.k, p=args.p, n_refs=len(pools))
    rng = item_rng(args.seed, "salt")
    out_matrix, weights = salt_interpolate(query, pools, cfg, rng)
    write_fmx(args.out, out_matrix)
    weights_path = Path(args.out).with_suffix(".weights.json")
    weights_path.write_text(
        json.dumps(
            {
                "weights": [float(w) for w in weights],
                "k": cfg.k,
                "p": cfg.p,
                "seed": args.seed,
                "query": str(args.query),
                "pools": [str(p) for p in args.pools],
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    _emit(
        args,
        {
            "out": str(args.out),
            "weights": [float(w) for w in weights],
            "rows": out_matrix.shape[0],
            "cols": out_matrix.shape[1],
        },
        [
            f"wrote {out_matrix.shape[0]} x {out_matrix.shape[1]} matrix to {args.out}",
            "weights: " + " ".join(f"{w:.6f}" for w in weights),
        ],
    )


def _load_pool_spec(spec: str) -> tuple[str, list[str]]:
    name, sep, path = spec.partition("=")
    if not sep or not name or not path:
        raise ValueError(f"--synth-pool expects NAME=PATH, got {spec!r}")
    if path.endswith(".jsonl"):
        ids = [e.id for e in Manifest.read(path).entries]
    else:
        ids = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]
    return name, ids


def cmd_plan_curriculum(args) -> None:
    manifest = Manifest.read(args.manifest)
    emb_dir = Path(args.embeddings)
    embeddings = {p.stem: read_fmx(p) for p in sorted(emb_dir.glob("*.fmx"))}
    annotated = annotate_similarity(manifest, embeddings)
    pools = dict(_load_pool_spec(s) for s in args.synth_pool or [])
    plan = partition_stages(
        annotated,
        threshold=args.threshold,
        synth_pools=pools,
        synth_ratio=args.synth_ratio,
        total_steps=args.total_steps,
    )
    for spec in args.alternate or []:
        plan = stage4_alternation(plan, [[p for p in spec.split(",") if p]])
    Path(args.out).write_text(plan.to_json() + "\n", encoding="utf-8")
    n_easy = len(plan.stages[0].item_ids)
    _emit(
        args,
        {
            "out": str(args.out),
            "stages": len(plan.stages),
            "stage1_fraction": plan.stage1_fraction,
            "items": len(manifest),
        },
        [
            f"stage 1: {n_easy}/{len(manifest)} items "
            f"({plan.stage1_fraction:.1%} below similarity {args.threshold})",
            f"wrote {len(plan.stages)}-stage plan to {args.out}",
        ],
    )


def cmd_schedule(args) -> None:
    plan = CurriculumPlan.from_json(Path(args.plan).read_text(encoding="utf-8"))
    rng = item_rng(args.seed, "schedule")
    batches = []
    for batch in schedule_batches(plan, args.batch_size, rng):
        batches.append(
            {
                "stage": batch.stage,
                "step": batch.step,
                "real_ids": batch.real_ids,
                "synthetic_ids": batch.synthetic_ids,
            }
        )
        if args.limit is not None and len(batches) >= args.limit:
            break
    text = "".join(json.dumps(b) + "\n" for b in batches)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _emit(
            args,
            {"batches": len(batches), "out": str(args.out)},
            [f"wrote {len(batches)} batches to {args.out}"],
        )
    elif getattr(args, "json", False):
        print(json.dumps({"batches": batches}, indent=2))
    else:
        sys.stdout.write(text)


def cmd_evaluate(args) -> None:
    report = evaluate_manifest(args.manifest, args.estimates, strict=args.strict)
    summary = report.aggregates()
    payload = {"summary": summary, "missing_ids": report.missing, "cap_db": report.cap_db}
    lines = [f"items scored: {summary['count']}, missing estimates: {summary['missing']}"]
    for name, label in (("isdr_db", "iSDR"), ("sdr_db", "SDR"), ("snr_loss_db", "SNR loss")):
        agg = summary[name]
        if agg["mean"] is not None:
            lines.append(f"mean {label}: {agg['mean']:.4f} dB (median {agg['median']:.4f})")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _echo_config(out, args, "evaluate")
        (out / "items.jsonl").write_text(report.to_json_lines(), encoding="utf-8")
        (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
        if args.csv:
            (out / "report.csv").write_text(report.to_csv(), encoding="utf-8")
        lines.append(f"report written to {out}")
        payload["out"] = str(out)
    _emit(args, payload, lines)


def cmd_inspect(args) -> None:
    path = Path(args.path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        matrix = read_fmx(path)
        _emit(
            args,
            {"kind": "fmx", "rows": matrix.shape[0], "cols": matrix.shape[1]},
            [f"FMX1 matrix: {matrix.shape[0]} rows x {matrix.shape[1]} cols"],
        )
        return
    first_line = path.read_text(encoding="utf-8").splitlines()
    if first_line and tuple(first_line[0].split("\t")) == REGISTRY_COLUMNS:
        reg = load_registry(path)
        speakers = reg.by_speaker()
        genders: dict[str, int] = {}
        for rec in reg:
            genders[rec.gender] = genders.get(rec.gender, 0) + 1
        payload = {
            "kind": "registry",
            "utterances": len(reg),
            "speakers": len(speakers),
            "genders": genders,
            "duration_s_total": sum(r.duration_s for r in reg),
        }
        _emit(
            args,
            payload,
            [
                f"registry: {len(reg)} utterances from {len(speakers)} speakers",
                f"genders: {genders}",
                f"total duration: {payload['duration_s_total']:.1f} s",
            ],
        )
        return
    manifest = Manifest.read(path)
    stats = manifest.stats(base_dir=path.parent)
    lines = [f"manifest: {stats['items']} items"]
    if "snr_db" in stats:
        s = stats["snr_db"]
        lines.append(f"snr_db: mean {s['mean']:.3f}, min {s['min']:.3f}, max {s['max']:.3f}")
    lines.append(f"interference genders: {stats['interference_gender']}")
    lines.append(f"items with noise: {stats['with_noise']}")
    lines.append(f"mixture audio total: {stats['mixture_seconds_total']:.1f} s")
    _emit(args, {"kind": "manifest", **stats}, lines)


def build_parser() -> _Parser:
    parser = _Parser(prog="tse-forge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-corpus", parents=[common], help="emit mixture/target/reference triplets")
    p.add_argument("--targets", required=True, help="target registry TSV")
    p.add_argument("--interferers", required=True, help="interferer registry TSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--filter", action="store_true", help="drop short utterances and sparse speakers first")
    p.add_argument("--level", type=float, default=-26.0, help="active speech level target, dBov")
    p.add_argument("--segment-seconds", type=float, default=6.0)
    p.add_argument("--snr-low", type=float, default=-5.0)
    p.add_argument("--snr-high", type=float, default=5.0)
    p.add_argument("--noise-registry", default=None, help="optional noise registry TSV")
    p.add_argument("--noise-prob", type=float, default=0.5)
    p.add_argument("--noise-snr-low", type=float, default=-5.0)
    p.add_argument("--noise-snr-high", type=float, default=10.0)
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("augment-noise", parents=[common], help="add noise to an existing corpus")
    p.add_argument("--manifest", required=True)
    p.add_argument("--noise-registry", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prob", type=float, default=0.5)
    p.add_argument("--snr-low", type=float, default=-5.0)
    p.add_argument("--snr-high", type=float, default=10.0)
    p.add_argument("--segment-seconds", type=float, default=6.0)
    p.set_defaults(func=cmd_augment_noise)

    p = sub.add_parser("salt-interp", parents=[common], help="synthetic-speaker latent interpolation")
    p.add_argument("--query", required=True, help="query FMX1 file")
    p.add_argument("--pools", required=True, nargs="+", help="reference pool FMX1 files")
    p.add_argument("--out", required=True, help="output FMX1 file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--p", type=float, default=0.5)
    p.set_defaults(func=cmd_salt_interp)

    p = sub.add_parser("plan-curriculum", parents=[common], help="partition a manifest into stages")
    p.add_argument("--manifest", required=True)
    p.add_argument("--embeddings", required=True, help="directory of <speaker_id>.fmx embeddings")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--synth-pool", action="append", metavar="NAME=PATH",
                   help="synthetic pool as manifest (.jsonl) or id list file; repeatable")
    p.add_argument("--synth-ratio", type=float, default=0.5)
    p.add_argument("--total-steps", type=int, default=100)
    p.add_argument("--alternate", action="append", metavar="POOLS",
                   help="append an alternation stage using comma-joined pool names; repeatable")
    p.add_argument("--out", required=True, help="plan JSON path")
    p.set_defaults(func=cmd_plan_curriculum)

    p = sub.add_parser("schedule", parents=[common], help="emit the batch stream for a plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--batch-size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=int, default=None, help="stop after this many batches")
    p.add_argument("--out", default=None, help="batch JSONL path (default stdout)")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("evaluate", parents=[common], help="score estimates against a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--estimates", required=True, help="directory of <id>.wav estimates")
    p.add_argument("--strict", action="store_true", help="fail on missing estimates")
    p.add_argument("--csv", action="store_true", help="also write report.csv under --out")
    p.add_argument("--out", default=None, help="report directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("inspect", parents=[common], help="describe a manifest, registry, or FMX1 file")
    p.add_argument("path")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("TSE_FORGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ToolkitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


run = main


if __name__ == "__main__":
    sys.exit(main())
