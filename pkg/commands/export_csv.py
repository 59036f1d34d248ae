"""Export a dataset as CSV for plotting elsewhere."""

from __future__ import annotations

import argparse

from advection import export_csv, read_dataset
from display import Display

from .base import Command


class ExportCsvCommand(Command):
    name = "export-csv"
    description = "Write every series of a dataset as CSV (series, step, v1..vn)."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("data", help="Dataset file")
        parser.add_argument("--out", required=True, help="CSV file to write")

    def execute(self, args: argparse.Namespace, display: Display) -> int:
        dataset = read_dataset(args.data)
        export_csv(dataset, args.out)
        display.show_message(f"Wrote {len(dataset)} series to {args.out}")
        return 0
