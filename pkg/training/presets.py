"""Experiment-size bundles for the informedness grid."""

from __future__ import annotations

from dataclasses import dataclass

from errors import UsageError


@dataclass(frozen=True)
class Preset:
    name: str
    series_by_vertices: dict[int, int]
    d_h: int
    d_z: int
    hidden_width: int
    epochs: int
    batch_size: int
    lr: float

    def n_series(self, n_vertices: int) -> int:
        """Dataset size for a graph; graphs of other sizes get the largest listed size."""
        if n_vertices in self.series_by_vertices:
            return self.series_by_vertices[n_vertices]
        return max(self.series_by_vertices.values())


PRESETS = {
    # Runs the full grid on a laptop CPU.
    "desk": Preset("desk", {4: 200, 10: 500}, d_h=16, d_z=16, hidden_width=16, epochs=30, batch_size=32, lr=1e-3),
    # Dataset sizes of the original experiments; widths are a guess since they were never published.
    "paper": Preset("paper", {4: 1000, 10: 10000}, d_h=64, d_z=64, hidden_width=128, epochs=100, batch_size=64, lr=1e-3),
}

ALIASES = {"full": "paper"}

PRESET_NAMES = sorted([*PRESETS, *ALIASES])


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[ALIASES.get(name, name)]
    except KeyError:
        raise UsageError(f"unknown preset '{name}', expected one of {PRESET_NAMES}") from None
