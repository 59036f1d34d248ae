"""
Windowed forecasting samples and their on-disk format.

A sample is the first `in_len` measurements of a series (the input window) and the
next `out_len` measurements (the target window).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Sequence

import numpy as np
import pandas as pd

from errors import ValidationError
from storage import read_blob, write_blob
from .simulator import VertexSeries

INPUT_LENGTH = 25
HORIZON = 24


@dataclass(frozen=True)
class ForecastSample:
    input_window: np.ndarray  # in_len x |V|
    target_window: np.ndarray  # out_len x |V|


@dataclass
class Dataset:
    """N samples stored as stacked arrays (N x in_len x |V|, N x out_len x |V|)."""

    inputs: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.inputs.ndim != 3 or self.targets.ndim != 3:
            raise ValidationError("dataset arrays must be 3-dimensional (samples x time x vertices)")
        if self.inputs.shape[0] != self.targets.shape[0] or self.inputs.shape[2] != self.targets.shape[2]:
            raise ValidationError(
                f"input shape {self.inputs.shape} and target shape {self.targets.shape} disagree"
            )

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def __getitem__(self, index: int) -> ForecastSample:
        return ForecastSample(self.inputs[index], self.targets[index])

    def __iter__(self) -> Iterator[ForecastSample]:
        return (self[i] for i in range(len(self)))

    @property
    def n_vertices(self) -> int:
        return self.inputs.shape[2]

    @property
    def input_length(self) -> int:
        return self.inputs.shape[1]

    @property
    def horizon(self) -> int:
        return self.targets.shape[1]

    def subset(self, indices: Sequence[int] | np.ndarray) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.inputs[indices], self.targets[indices], dict(self.metadata))


def build_dataset(
    series: Sequence[VertexSeries],
    in_len: int = INPUT_LENGTH,
    out_len: int = HORIZON,
    metadata: dict[str, Any] | None = None,
) -> Dataset:
    """One sample per series: the first in_len points as input, the next out_len as target."""
    inputs, targets = [], []
    for index, item in enumerate(series):
        if len(item) < in_len + out_len:
            raise ValidationError(
                f"series {index} has {len(item)} points; {in_len} + {out_len} are needed"
            )
        inputs.append(item.measurements[:in_len])
        targets.append(item.measurements[in_len:in_len + out_len])

    if not inputs:
        return Dataset(np.zeros((0, in_len, 0)), np.zeros((0, out_len, 0)), dict(metadata or {}))
    return Dataset(np.stack(inputs), np.stack(targets), dict(metadata or {}))


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    metadata = dict(dataset.metadata)
    metadata["n_samples"] = len(dataset)
    write_blob(path, "dataset", metadata, {"inputs": dataset.inputs, "targets": dataset.targets})


def read_dataset(path: str | Path) -> Dataset:
    header, arrays = read_blob(path, "dataset")
    if set(arrays) != {"inputs", "targets"}:
        raise ValidationError(f"{path}: dataset must hold 'inputs' and 'targets', found {sorted(arrays)}")
    inputs, targets = arrays["inputs"], arrays["targets"]
    declared = header.get("n_samples")
    if declared is not None and declared != inputs.shape[0]:
        raise ValidationError(f"{path}: header declares {declared} samples, payload holds {inputs.shape[0]}")
    metadata = {k: v for k, v in header.items() if k not in ("arrays", "kind", "n_samples")}
    return Dataset(inputs, targets, metadata)


def dataset_frame(dataset: Dataset) -> pd.DataFrame:
    """Long-format table: one row per (series, step) with one column per vertex."""
    full = np.concatenate([dataset.inputs, dataset.targets], axis=1)
    n_samples, n_points, n_vertices = full.shape
    frame = pd.DataFrame(
        full.reshape(n_samples * n_points, n_vertices),
        columns=[f"v{v + 1}" for v in range(n_vertices)],
    )
    frame.insert(0, "step", np.tile(np.arange(n_points), n_samples))
    frame.insert(0, "series", np.repeat(np.arange(n_samples), n_points))
    return frame


def export_csv(dataset: Dataset, path: str | Path) -> None:
    """Write every series (input followed by target window) for plotting."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    dataset_frame(dataset).to_csv(path, index=False)
