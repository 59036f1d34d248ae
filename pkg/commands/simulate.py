"""Generate a dataset of advection series on a graph."""

from __future__ import annotations

import argparse
from pathlib import Path

from advection import SimulationConfig, write_dataset
from config import add_dataclass_flags
from display import Display
from topology import load_graph
from training import generate_dataset

from .base import Command
from .common import Layers, add_graph_argument, manifest


class SimulateCommand(Command):
    name = "simulate"
    description = "Simulate advection series on a graph and write them as a dataset."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_graph_argument(parser)
        parser.add_argument("--series", type=int, default=200, help="Number of series (default: 200)")
        parser.add_argument("--out", required=True, help="Dataset file to write")
        parser.add_argument("--workers", type=int, default=1, help="Simulation processes (default: 1)")
        # Short spellings of the most used simulation fields.
        parser.add_argument("--seed", dest="simulation.seed", type=int, default=None)
        parser.add_argument("--sigma", dest="simulation.shift_per_step", type=int, default=None,
                            help="Segments moved per step")
        parser.add_argument("--steps", dest="simulation.n_steps", type=int, default=None)
        add_dataclass_flags(parser, SimulationConfig, "simulation")

    def execute(self, args: argparse.Namespace, display: Display) -> int:
        graph = load_graph(args.graph)
        sim_config = Layers(args).simulation()
        display.show_config("Simulation", {"graph": graph.name, "series": args.series, **sim_config.to_dict()})

        display.show_working(f"Simulating {args.series} series...")
        try:
            dataset = generate_dataset(graph, sim_config, args.series, workers=args.workers)
        finally:
            display.hide_working()

        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_dataset(dataset, out)
        manifest(out.with_name(out.name + ".manifest.json"), graph=graph.to_dict(), simulation=sim_config,
                 n_series=args.series)
        display.show_message(f"Wrote {len(dataset)} samples to {out}")
        return 0
