"""Command line entry point: tse-forge-adapter <subcommand>."""

import argparse
import json
import logging
import os
import sys

from . import __version__
from .errors import AdapterError, ModelLoadError, RegistryError
from .extract import ExtractionJob, extract_embeddings, extract_frame_features


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tse-forge-adapter", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, runner, blurb in (
        ("extract-embeddings", extract_embeddings, "one 1x192 speaker embedding per speaker"),
        ("extract-frames", extract_frame_features, "one TxD frame-feature matrix per utterance"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--registry", required=True, help="utterance registry TSV")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--model", default="builtin-dsp", help="'builtin-dsp' or 'hf:<name>'")
        p.add_argument("--layer", type=int, default=3, help="model layer for frame features")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(runner=runner)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=os.environ.get("TSE_FORGE_ADAPTER_LOG", "WARNING").upper())
    try:
        job = ExtractionJob(registry=args.registry, out_dir=args.out, model=args.model, layer=args.layer)
        report = args.runner(job)
    except (RegistryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ModelLoadError, AdapterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps({
            "command": args.command,
            "out": report.out_dir,
            "utterances_ok": report.ok,
            "failures": report.failures,
        }))
    else:
        print(f"{args.command}: {report.ok} utterances -> {report.out_dir}")
        for utt, reason in report.failures.items():
            print(f"  failed {utt}: {reason}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
