"""Helpers shared by subcommands: graph and dataset loading, config layering, manifests."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any

from advection import Dataset, SimulationConfig, read_dataset
from config import (
    dataclass_from_mapping,
    load_config_file,
    parse_overrides,
    resolve,
    resolve_values,
    write_manifest,
)
from errors import ValidationError
from gncde import InnerMechanism, ModelConfig, OuterMechanism
from topology import Graph
from training import TrainConfig


class Layers:
    """The config file and --set overrides of one invocation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = load_config_file(getattr(args, "config", None))
        self.overrides = parse_overrides(getattr(args, "set", None))

    def simulation(self, base: dict[str, Any] | None = None) -> SimulationConfig:
        return resolve(SimulationConfig, "simulation", self.file, args=self.args, base=base, overrides=self.overrides)

    def training(self, base: dict[str, Any] | None = None) -> TrainConfig:
        return resolve(TrainConfig, "training", self.file, args=self.args, base=base, overrides=self.overrides)

    def model(
        self,
        graph: Graph,
        base: dict[str, Any] | None = None,
        inner: str | None = None,
        outer: str | None = None,
    ) -> ModelConfig:
        """
        Model config for `graph`.

        Informed matrices come from the config layers when given there, otherwise
        they are built from the graph's adjacency.
        """
        values = resolve_values(
            ModelConfig,
            "model",
            self.file,
            args=self.args,
            base={"n_vertices": graph.n_vertices, **(base or {})},
            overrides=self.overrides,
        )
        if values["n_vertices"] != graph.n_vertices:
            raise ValidationError(
                f"model n_vertices={values['n_vertices']} but graph '{graph.name}' has {graph.n_vertices} vertices"
            )
        inner_value = inner or values.pop("inner_mech", InnerMechanism.IDENTITY)
        outer_value = outer or values.pop("outer_mech", OuterMechanism.IDENTITY)
        values.pop("inner_mech", None)
        values.pop("outer_mech", None)
        try:
            inner_mech, outer_mech = InnerMechanism(inner_value), OuterMechanism(outer_value)
        except ValueError as e:
            raise ValidationError(str(e)) from e
        a_inner = values.pop("a_inner", None)
        a_outer = values.pop("a_outer", None)

        config = dataclass_from_mapping(ModelConfig, values).with_mechanisms(inner_mech, outer_mech, graph.adjacency)
        if a_inner is not None or a_outer is not None:
            explicit = config.to_dict()
            if a_inner is not None:
                explicit["a_inner"] = a_inner
            if a_outer is not None:
                explicit["a_outer"] = a_outer
            config = dataclass_from_mapping(ModelConfig, explicit)
        return config


def add_graph_argument(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--graph", required=required, help="Graph file (JSON)")


def parse_seeds(text: str) -> list[int]:
    """'0,1,2' or '0-4' -> list of seeds."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        start, dash, stop = part.partition("-")
        try:
            seeds.extend(range(int(start), int(stop) + 1) if dash else [int(part)])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad seed list '{text}'") from None
    if not seeds:
        raise argparse.ArgumentTypeError("the seed list is empty")
    return seeds


def open_dataset(path: str, graph: Graph | None = None, input_length: int | None = None) -> Dataset:
    """Read a dataset and check it fits the graph and the model window."""
    dataset = read_dataset(path)
    if graph is not None and len(dataset) and dataset.n_vertices != graph.n_vertices:
        raise ValidationError(
            f"dataset '{path}' has {dataset.n_vertices} vertices, graph '{graph.name}' has {graph.n_vertices}"
        )
    if input_length is not None and dataset.input_length != input_length:
        raise ValidationError(
            f"dataset '{path}' has input windows of {dataset.input_length} points, the model expects {input_length}"
        )
    return dataset


def manifest(path: Path, **entries: Any) -> Path:
    return write_manifest(path, sys.argv, **entries)
