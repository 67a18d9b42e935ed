"""qfs-bridge command line: finetune and infer over JSONL files.

Hyperparameter overrides use repeated --set key=value flags; everything,
defaults and overrides alike, lands in the checkpoint manifest.
"""
from __future__ import annotations

import argparse
import sys
from typing import Dict, Optional, Sequence

from .infer import run_infer
from .spec import TASKS, BridgeError, BridgeJobSpec, default_hyperparams
from .train import run_finetune


def _parse_overrides(pairs, task) -> Dict[str, float | int]:
    defaults = default_hyperparams(task)
    out: Dict[str, float | int] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise BridgeError(f"--set expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        if key not in defaults:
            raise BridgeError(f"unknown hyperparam {key!r}")
        out[key] = type(defaults[key])(float(value))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfs-bridge")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="supervised fine-tuning from JSONL")
    p.add_argument("--task", required=True, choices=TASKS)
    p.add_argument("--train", required=True)
    p.add_argument("--eval")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--model-name", default="tiny-transformer")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="hyperparameter override, recorded in the manifest")
    p.add_argument("--max-source-len", type=int, default=128)
    p.add_argument("--max-target-len", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("infer", help="batch generation over JSONL inputs")
    p.add_argument("--task", required=True, choices=TASKS)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--in", dest="infer_in", required=True)
    p.add_argument("--out", dest="infer_out", required=True)
    p.add_argument("--max-source-len", type=int, default=128)
    p.add_argument("--max-target-len", type=int, default=16)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "finetune":
            spec = BridgeJobSpec(
                task=args.task,
                model_name=args.model_name,
                train_path=args.train,
                eval_path=args.eval,
                checkpoint_dir=args.checkpoint,
                hyperparams=_parse_overrides(getattr(args, "set"), args.task),
                max_source_len=args.max_source_len,
                max_target_len=args.max_target_len,
                seed=args.seed,
            )
            manifest = run_finetune(spec)
            print(f"{manifest['optimizer_steps']} optimizer steps, "
                  f"checkpoint at {args.checkpoint}")
        else:
            spec = BridgeJobSpec(
                task=args.task,
                checkpoint_dir=args.checkpoint,
                infer_in_path=args.infer_in,
                infer_out_path=args.infer_out,
                max_source_len=args.max_source_len,
                max_target_len=args.max_target_len,
            )
            records = run_infer(spec)
            print(f"{len(records)} outputs written to {args.infer_out}")
        return 0
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
