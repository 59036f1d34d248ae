"""
Metrics log for training runs.

Writes one JSON record per line so a run can be replayed or plotted later.
The log is append-only: every record is flushed to disk as soon as it is written,
and reopening an existing file continues it (this is how resumed runs extend
their log).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any


class MetricsLog:
    """Append-only newline-delimited JSON log."""

    def __init__(self, output_path: str | Path, run: str | None = None):
        """
        Args:
            output_path: Path of the .jsonl file (created with parents if needed)
            run: Optional label stamped on every record (e.g. the grid variant)
        """
        self.path = Path(output_path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.run = run

    def _write(self, record: dict[str, Any]) -> None:
        if self.run is not None:
            record = {"run": self.run, **record}
        with self.path.open("a") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    def write_epoch(self, epoch: int, split: str, mae: float, wall_time: float) -> None:
        """Record the MAE of one split after an epoch."""
        self._write({"event": "epoch", "epoch": epoch, "split": split, "mae": mae, "wall_time": wall_time})

    def write_variant(self, result: dict[str, Any]) -> None:
        """Record the final result of one grid variant."""
        self._write({"event": "variant", **result})

    def write_abort(self, message: str, context: dict[str, Any]) -> None:
        """Record a numeric abort with its diagnostic context."""
        self._write({"event": "abort", "message": message, **context})


def read_metrics(path: str | Path) -> list[dict[str, Any]]:
    """Replay a metrics log."""
    path = Path(path)
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
