"""
Terminal display using the rich library.

This module handles all user-facing output so that library code only logs.

Color scheme:
- Blue: Inputs (graphs, datasets)
- Cyan: Resolved configuration
- Yellow: Progress (simulation, training epochs)
- Green: Results
- Red: Errors
"""

from __future__ import annotations

import json
from typing import Any, Sequence

import numpy as np
import pandas as pd
from rich.console import Console
from rich.live import Live
from rich.panel import Panel
from rich.spinner import Spinner
from rich.syntax import Syntax
from rich.table import Table

from topology import EdgeList


def _fmt(value: float, digits: int = 4) -> str:
    if value == 0:
        return "0"
    return f"{value:.{digits}f}".rstrip("0").rstrip(".")


def matrix_table(title: str, matrix: np.ndarray, rows: Sequence[str], columns: Sequence[str]) -> Table:
    """A right-aligned decimal table of a matrix."""
    table = Table(title=title, title_style="bold", show_lines=False)
    table.add_column("", style="dim")
    for name in columns:
        table.add_column(name, justify="right")
    for name, row in zip(rows, matrix):
        table.add_row(name, *(_fmt(float(x)) for x in row))
    return table


class Display:
    """Handles all terminal output with colors and formatting."""

    def __init__(self, console: Console | None = None):
        self.console = console or Console()
        self._live = None

    def show_working(self, text: str) -> None:
        """Show a spinner during a long step."""
        self.hide_working()
        self._live = Live(
            Spinner("dots", text=text, style="yellow"),
            console=self.console,
            refresh_per_second=10,
            transient=True,
        )
        self._live.start()

    def hide_working(self) -> None:
        """Hide the spinner."""
        if self._live:
            self._live.stop()
            self._live = None

    def show_config(self, title: str, values: dict[str, Any]) -> None:
        """Display a resolved configuration as JSON."""
        json_str = json.dumps(values, indent=2, default=str)
        syntax = Syntax(json_str, "json", theme="monokai", word_wrap=True)
        self.console.print(Panel(syntax, title=title, border_style="cyan"))

    def show_graph(
        self,
        name: str,
        edges: EdgeList,
        incidence: np.ndarray,
        positive: np.ndarray,
        negative: np.ndarray,
        conservative: np.ndarray,
        transition: np.ndarray,
    ) -> None:
        """Display the edge list, the incidence forms and the edge transition matrix."""
        vertices = [f"v{v + 1}" for v in range(edges.n_vertices)]
        labels = [f"e{i + 1}" for i in range(len(edges))]

        edge_table = Table(title=f"Edges of {name}", title_style="bold")
        for column in ("edge", "tail", "head", "split p", "length"):
            edge_table.add_column(column, justify="right")
        for label, edge in zip(labels, edges):
            edge_table.add_row(label, str(edge.tail + 1), str(edge.head + 1), _fmt(edge.split_weight), str(edge.length))
        self.console.print(Panel(edge_table, title="Graph", border_style="blue"))

        for title, matrix in (("I", incidence), ("I+", positive), ("I-", negative), ("I^c", conservative)):
            self.console.print(matrix_table(title, matrix, vertices, labels))
        self.console.print(
            Panel(
                matrix_table("A_E (rows: destination, columns: source)", transition, labels, labels),
                title="Edge transition matrix",
                border_style="green",
            )
        )

    def show_dataset(self, path: str, n_samples: int, input_shape: tuple, target_shape: tuple,
                     metadata: dict[str, Any], splits: dict[str, int] | None = None) -> None:
        """Display a dataset summary."""
        table = Table(show_header=False)
        table.add_column("field", style="dim")
        table.add_column("value")
        table.add_row("file", path)
        table.add_row("samples", str(n_samples))
        table.add_row("input window", " x ".join(map(str, input_shape)))
        table.add_row("target window", " x ".join(map(str, target_shape)))
        for key in ("seed", "n_series"):
            if key in metadata:
                table.add_row(key, str(metadata[key]))
        for split, size in (splits or {}).items():
            table.add_row(f"{split} split", str(size))
        self.console.print(Panel(table, title="Dataset", border_style="blue"))
        if "simulation" in metadata:
            self.show_config("Simulation", metadata["simulation"])

    def show_epoch(self, epoch: int, epochs: int, train_mae: float, val_mae: float | None) -> None:
        """One progress line per epoch."""
        val = f"{val_mae:.4f}" if val_mae is not None else "-"
        self.console.print(f"[yellow]epoch {epoch:>3}/{epochs}[/yellow]  train MAE {train_mae:.4f}  val MAE {val}")

    def show_metric(self, title: str, value: float) -> None:
        self.console.print(Panel(f"{value:.6f}", title=title, border_style="green"))

    def show_results(self, frame: pd.DataFrame, table: pd.DataFrame | None = None) -> None:
        """Display per-run rows and the pivoted mechanism table."""
        runs = Table(title="Runs", title_style="bold")
        for column in frame.columns:
            runs.add_column(str(column), justify="right")
        for _, row in frame.iterrows():
            runs.add_row(*(_fmt(v) if isinstance(v, float) else str(v) for v in row))
        self.console.print(runs)

        if table is not None and not table.empty:
            pivot = Table(title="Median test MAE (rows: inner, columns: outer)", title_style="bold")
            pivot.add_column("inner")
            for column in table.columns:
                pivot.add_column(str(column), justify="right")
            for inner, row in table.iterrows():
                pivot.add_row(str(inner), *(_fmt(float(v)) if pd.notna(v) else "-" for v in row))
            self.console.print(Panel(pivot, title="Results", border_style="green"))

    def show_checks(self, lines: Sequence[tuple[str, bool | None]]) -> None:
        """Display pass/fail lines for ordering checks."""
        rendered = []
        for text, passed in lines:
            mark = "[green]✓[/green]" if passed else ("[red]✗[/red]" if passed is False else "[dim]?[/dim]")
            rendered.append(f"{mark} {text}")
        self.console.print(Panel("\n".join(rendered), title="Checks", border_style="green"))

    def show_message(self, message: str) -> None:
        self.console.print(Panel(message, border_style="green"))

    def show_error(self, error: str) -> None:
        """Display an error message."""
        self.hide_working()
        self.console.print(Panel(error, title="Error", border_style="red"))
