"""boundtune command line: fine-tune and export frame scores.

    boundtune train --config spec.json [--corpus DIR] [--out DIR] ...
    boundtune export --checkpoints DIR|FILE... --corpus DIR --out DIR
                     [--chunk-len 30] [--step 15] [--per-chunk] [--average]

The train config file is JSON mirroring TrainSpec; explicit flags win.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataio import DataError, ExportError
from .export import export_scores
from .train import TrainSpec, finetune


def build_parser():
    ap = argparse.ArgumentParser(prog="boundtune")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune one model per seed")
    p.add_argument("--config", help="JSON file mirroring TrainSpec")
    p.add_argument("--corpus")
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--model", dest="pretrained_model")
    p.add_argument("--mode", choices=["prosodic", "prosodic+intermediate"])
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--chunk-len", dest="chunk_len_s", type=float)
    p.add_argument("--step", dest="step_s", type=float)
    p.add_argument("--seeds", help="comma-separated seed list")
    p.add_argument("--held-out-speaker", dest="held_out_speaker")

    p = sub.add_parser("export", help="write score files from checkpoints")
    p.add_argument("--checkpoints", nargs="+", required=True,
                   help="checkpoint files or a directory of seed*.pt")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--chunk-len", dest="chunk_len_s", type=float, default=30.0)
    p.add_argument("--step", dest="step_s", type=float, default=15.0)
    p.add_argument("--per-chunk", action="store_true")
    p.add_argument("--average", action="store_true")
    return ap


def _train_spec(args) -> TrainSpec:
    overrides = {k: getattr(args, k) for k in
                 ("corpus", "out_dir", "pretrained_model", "mode", "epochs",
                  "learning_rate", "chunk_len_s", "step_s",
                  "held_out_speaker")}
    if args.seeds is not None:
        overrides["seeds"] = tuple(int(s) for s in args.seeds.split(","))
    if args.config:
        return TrainSpec.from_config(args.config, **overrides)
    provided = {k: v for k, v in overrides.items() if v is not None}
    missing = {"corpus", "out_dir"} - set(provided)
    if missing:
        raise DataError(f"missing required options: "
                        f"{', '.join('--' + m.replace('_', '-') for m in sorted(missing))}")
    return TrainSpec(**provided)


def _resolve_checkpoints(items) -> list[Path]:
    out = []
    for item in items:
        path = Path(item)
        if path.is_dir():
            found = sorted(path.glob("seed*.pt"))
            if not found:
                raise DataError(f"{path}: no seed*.pt checkpoints found")
            out.extend(found)
        else:
            out.append(path)
    return out


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "train":
            spec = _train_spec(args)
            checkpoints = finetune(spec)
            for c in checkpoints:
                print(f"checkpoint: {c}")
        else:
            written = export_scores(
                _resolve_checkpoints(args.checkpoints), args.corpus, args.out,
                chunk_len_s=args.chunk_len_s, step_s=args.step_s,
                per_chunk=args.per_chunk, average=args.average)
            print(f"wrote {len(written)} score files under {args.out}")
        return 0
    except (DataError, ExportError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
