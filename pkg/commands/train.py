"""Train one mechanism pair on a dataset."""

from __future__ import annotations

import argparse
from pathlib import Path

from config import add_dataclass_flags
from display import Display
from gncde import InnerMechanism, ModelConfig, OuterMechanism, count_params, init_params
from metrics import MetricsLog
from topology import load_graph
from training import (
    EpochMetrics,
    TrainConfig,
    TrainingState,
    checkpoint_load,
    checkpoint_save,
    evaluate,
    split_indices,
    train,
)

from .base import Command
from .common import Layers, add_graph_argument, manifest, open_dataset


class TrainCommand(Command):
    name = "train"
    description = "Train a GNCDE on a dataset and write checkpoint, metrics and manifest."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--data", required=True, help="Dataset file")
        add_graph_argument(parser)
        parser.add_argument("--inner", choices=[m.value for m in InnerMechanism], default=None)
        parser.add_argument("--outer", choices=[m.value for m in OuterMechanism], default=None)
        parser.add_argument("--out", required=True, help="Run directory")
        parser.add_argument("--resume", action="store_true",
                            help="Continue from the run directory's checkpoint")
        add_dataclass_flags(parser, ModelConfig, "model")
        add_dataclass_flags(parser, TrainConfig, "training")

    def execute(self, args: argparse.Namespace, display: Display) -> int:
        layers = Layers(args)
        graph = load_graph(args.graph)
        model_config = layers.model(graph, inner=args.inner, outer=args.outer)
        train_config = layers.training()
        dataset = open_dataset(args.data, graph, model_config.input_length)

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        checkpoint = out / "checkpoint.bin"
        if args.resume:
            state, _ = checkpoint_load(checkpoint, model_config)
        else:
            state = TrainingState.fresh(init_params(model_config, seed=train_config.seed), train_config)

        display.show_config("Model", {**model_config.to_dict(), "n_params": count_params(model_config)})
        display.show_config("Training", train_config.to_dict())
        manifest(out / "manifest.json", data=args.data, graph=graph.to_dict(), model=model_config,
                 training=train_config, dataset=dataset.metadata.get("simulation"))

        def on_epoch(metrics: EpochMetrics) -> None:
            display.show_epoch(metrics.epoch, train_config.epochs, metrics.train_mae, metrics.val_mae)
            checkpoint_save(checkpoint, model_config, train_config, state)

        result = train(
            model_config,
            state.params,
            dataset,
            train_config,
            log=MetricsLog(out / "metrics.jsonl"),
            state=state,
            on_epoch=on_epoch,
        )
        checkpoint_save(checkpoint, model_config, train_config, result.state)

        _, _, test_idx = split_indices(len(dataset), train_config)
        if len(test_idx):
            test_mae = evaluate(model_config, result.params, dataset.subset(test_idx), train_config.batch_size)
            display.show_metric(f"Test MAE (best epoch {result.state.best_epoch})", test_mae)
        return 0
