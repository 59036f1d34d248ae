"""Describe a dataset file and its deterministic split."""

from __future__ import annotations

import argparse

from advection import read_dataset
from config import add_dataclass_flags
from display import Display
from training import TrainConfig, split_indices

from .base import Command
from .common import Layers


class DatasetCommand(Command):
    name = "dataset"
    description = "Print a dataset's header, shapes and split sizes."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("data", help="Dataset file")
        add_dataclass_flags(parser, TrainConfig, "training")

    def execute(self, args: argparse.Namespace, display: Display) -> int:
        dataset = read_dataset(args.data)
        train_config = Layers(args).training()
        train_idx, val_idx, test_idx = split_indices(len(dataset), train_config)
        display.show_dataset(
            args.data,
            len(dataset),
            dataset.inputs.shape[1:],
            dataset.targets.shape[1:],
            dataset.metadata,
            splits={"train": len(train_idx), "val": len(val_idx), "test": len(test_idx)},
        )
        return 0
