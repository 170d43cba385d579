"""Trainer command line: train, predict, lr-find.

Exit codes: 0 success, 1 usage error, 2 trainer/data error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import TrainerError
from .lr_finder import lr_find
from .predict import predict
from .train import TrainerConfig, train


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


class _Usage(Exception):
    pass


def _trainer_config(args) -> TrainerConfig:
    return TrainerConfig(
        architecture=args.architecture,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        input_resize=args.input_resize,
        seed=args.seed,
        pretrained=not args.no_pretrained,
        freeze_backbone=not args.full_finetune,
        deterministic=not args.nondeterministic,
        early_stopping=args.early_stopping,
    )


def _config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--architecture", choices=("resnet50", "resnet34"), default="resnet50")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch-size", type=int, default=6)
    p.add_argument("--learning-rate", type=float, default=0.05)
    p.add_argument("--input-resize", type=int, default=224)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-pretrained", action="store_true",
                   help="random-initialize instead of fetching ImageNet weights")
    p.add_argument("--full-finetune", action="store_true",
                   help="update the whole network, not just the new head")
    p.add_argument("--nondeterministic", action="store_true")
    p.add_argument("--early-stopping", action="store_true")


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _Parser(prog="pcapvis-train")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit a model on the manifest's train split")
    p_train.add_argument("--manifest", required=True)
    p_train.add_argument("--out-dir", required=True)
    _config_flags(p_train)

    p_pred = sub.add_parser("predict", help="score the manifest's test split")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--manifest", required=True)
    p_pred.add_argument("--out", required=True)

    p_lr = sub.add_parser("lr-find", help="learning-rate range sweep")
    p_lr.add_argument("--manifest", required=True)
    _config_flags(p_lr)

    try:
        args = parser.parse_args(argv)
        if args.command == "train":
            artifact, logs = train(args.manifest, _trainer_config(args), args.out_dir)
            print(f"model: {artifact}")
            print(f"epochs logged: {len(logs)}")
        elif args.command == "predict":
            records = predict(args.model, args.manifest, args.out)
            print(f"predictions: {len(records)} -> {args.out}")
        else:
            result = lr_find(args.manifest, _trainer_config(args))
            print(f"suggested learning rate: {result.suggestion:.2e}")
        return 0
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (TrainerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
