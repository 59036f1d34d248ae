"""Run the informedness grid on a graph and report the results table."""

from __future__ import annotations

import argparse
from pathlib import Path

from advection import SimulationConfig
from config import add_dataclass_flags
from display import Display
from gncde import ModelConfig
from topology import load_graph
from training import (
    PRESET_NAMES,
    ExperimentResult,
    TrainConfig,
    get_preset,
    grid_variants,
    results_frame,
    results_table,
    run_grid,
    summarize,
)

from .base import Command
from .common import Layers, add_graph_argument, manifest, parse_seeds


class GridCommand(Command):
    name = "grid"
    description = "Train every (inner, outer) variant per seed and write results.csv."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_graph_argument(parser)
        parser.add_argument("--preset", choices=PRESET_NAMES, default="desk", help="Experiment size (default: desk)")
        parser.add_argument("--seeds", type=parse_seeds, default=[0], help="Seeds, e.g. 0,1,2 or 0-4 (default: 0)")
        parser.add_argument("--series", type=int, default=None, help="Override the preset's number of series")
        parser.add_argument("--include-informed-both", action="store_true",
                            help="Also train informed inner with informed outer")
        parser.add_argument("--workers", type=int, default=1, help="Processes for simulation and variants")
        parser.add_argument("--out", default="grid", help="Output directory (default: grid)")
        add_dataclass_flags(parser, SimulationConfig, "simulation")
        add_dataclass_flags(parser, ModelConfig, "model")
        add_dataclass_flags(parser, TrainConfig, "training")

    def execute(self, args: argparse.Namespace, display: Display) -> int:
        layers = Layers(args)
        graph = load_graph(args.graph)
        preset = get_preset(args.preset)
        sim_config = layers.simulation()
        template = layers.model(graph, base={"d_h": preset.d_h, "d_z": preset.d_z, "hidden_width": preset.hidden_width})
        train_config = layers.training(
            base={"epochs": preset.epochs, "batch_size": preset.batch_size, "lr": preset.lr}
        )
        n_series = args.series if args.series is not None else preset.n_series(graph.n_vertices)
        variants = grid_variants(args.include_informed_both)

        out = Path(args.out)
        display.show_config("Grid", {
            "graph": graph.name,
            "preset": preset.name,
            "seeds": args.seeds,
            "series": n_series,
            "variants": [f"{inner.value} x {outer.value}" for inner, outer in variants],
        })
        manifest(out / "manifest.json", graph=graph.to_dict(), preset=preset.name, seeds=args.seeds,
                 n_series=n_series, simulation=sim_config, model=template, training=train_config,
                 include_informed_both=args.include_informed_both)

        total = len(variants) * len(args.seeds)
        done = 0

        def on_result(result: ExperimentResult) -> None:
            nonlocal done
            done += 1
            display.hide_working()
            display.console.print(
                f"[yellow]{done}/{total}[/yellow] seed {result.seed}: {result.inner} x {result.outer}"
                f"  MAE {result.mae:.4f}  ({result.status})"
            )
            if done < total:
                display.show_working("Training...")

        display.show_working("Simulating and training...")
        try:
            results = run_grid(
                graph,
                sim_config,
                template,
                train_config,
                n_series,
                seeds=args.seeds,
                out_dir=out,
                include_informed_both=args.include_informed_both,
                workers=args.workers,
                on_result=on_result,
            )
        finally:
            display.hide_working()

        summary = summarize(results)
        display.show_results(results_frame(results), results_table(results))
        display.show_checks([
            (f"outer informed beats identity x identity on {summary.outer_informed_wins}/{summary.n_seeds} seeds "
             f"(need {summary.outer_informed_required})", summary.outer_informed_holds),
            (f"outer informed does not hurt AGC on {summary.agc_informed_wins}/{summary.n_seeds} seeds "
             f"(need {summary.agc_informed_required})", summary.agc_informed_holds),
            (f"median epochs to threshold: informed outer {summary.median_threshold_informed}, "
             f"identity outer {summary.median_threshold_identity}", summary.faster_convergence),
        ])
        display.show_message(f"Results written to {out / 'results.csv'}")
        if summary.aborted:
            display.show_error(f"{summary.aborted} variant(s) aborted on non-finite values")
            return 4
        return 0
