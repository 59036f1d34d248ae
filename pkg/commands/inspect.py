"""Print a graph's edge list, incidence matrices and edge transition matrix."""

from __future__ import annotations

import argparse

from advection import SimulationConfig
from config import add_dataclass_flags
from display import Display
from topology import load_graph, split_incidence

from .base import Command
from .common import Layers, add_graph_argument


class InspectCommand(Command):
    name = "inspect"
    description = "Show the edge list, I, I+, I-, I^c and A_E of a graph."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_graph_argument(parser)
        add_dataclass_flags(parser, SimulationConfig, "simulation")

    def execute(self, args: argparse.Namespace, display: Display) -> int:
        graph = load_graph(args.graph)
        sim_config = Layers(args).simulation()
        edges = graph.edge_list(sim_config.segments_per_edge)
        split = split_incidence(graph.incidence)
        display.show_graph(
            graph.name,
            edges,
            graph.incidence.entries,
            split.positive,
            split.negative,
            split.conservative,
            graph.transition.entries,
        )
        return 0
