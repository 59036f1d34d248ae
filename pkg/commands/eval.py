"""Evaluate a checkpoint's best parameters on one split of a dataset."""

from __future__ import annotations

import argparse
from pathlib import Path

from autodiff import Tensor, load_checkpoint
from config import dataclass_from_mapping
from display import Display
from errors import ValidationError
from gncde import ModelConfig
from training import TrainConfig, checkpoint_load, evaluate, split_indices

from .base import Command
from .common import manifest, open_dataset

SPLITS = ("train", "val", "test", "all")


class EvalCommand(Command):
    name = "eval"
    description = "Report the MAE of a trained checkpoint on a dataset split."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--data", required=True, help="Dataset file")
        parser.add_argument("--checkpoint", required=True, help="Checkpoint written by train")
        parser.add_argument("--split", choices=SPLITS, default="test", help="Which samples (default: test)")
        parser.add_argument("--current", action="store_true",
                            help="Use the last parameters instead of the best-validation ones")

    def execute(self, args: argparse.Namespace, display: Display) -> int:
        _, _, metadata, _ = load_checkpoint(args.checkpoint)
        if "model_config" not in metadata or "train_config" not in metadata:
            raise ValidationError(f"{args.checkpoint} was not written by train (no model or training config)")
        model_config = dataclass_from_mapping(ModelConfig, metadata["model_config"])
        train_config = dataclass_from_mapping(TrainConfig, metadata["train_config"])
        state, _ = checkpoint_load(args.checkpoint, model_config)
        dataset = open_dataset(args.data, input_length=model_config.input_length)

        if args.split == "all":
            subset = dataset
        else:
            indices = dict(zip(("train", "val", "test"), split_indices(len(dataset), train_config)))[args.split]
            subset = dataset.subset(indices)

        if args.current:
            params = state.params
        else:
            params = {name: Tensor(array) for name, array in state.best_params.items()}
        value = evaluate(model_config, params, subset, train_config.batch_size)
        display.show_metric(f"{args.split} MAE ({len(subset)} samples)", value)
        checkpoint = Path(args.checkpoint)
        manifest(checkpoint.with_name(f"{checkpoint.name}.eval-{args.split}.manifest.json"),
                 data=args.data, checkpoint=str(checkpoint), split=args.split, current=args.current,
                 n_samples=len(subset), mae=value, seed=train_config.seed, model=model_config,
                 training=train_config)
        return 0
