"""
Advection of a scalar quantity along graph edges.

Each edge is a row of segments ordered tail -> head. One step moves every segment
`shift` positions towards the head; the `shift` head-most segments leave the edge,
pass through its head vertex (where they are measured) and are routed onto the
successor edges in proportion to the edge transition matrix.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from errors import ValidationError
from topology import EdgeList, EdgeTransitionMatrix, Graph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulationConfig:
    """Discretisation, initial condition and seed of a simulation run."""

    segments_per_edge: int = 100
    shift_per_step: int = 4  # velocity * dt, in whole segments
    n_steps: int = 48
    init_count: int = 50
    init_low: int = 0
    init_high: int = 10
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self, min_length: int | None = None) -> None:
        length = self.segments_per_edge if min_length is None else min_length
        if self.segments_per_edge < 1:
            raise ValidationError(f"segments_per_edge must be positive, got {self.segments_per_edge}")
        if not 1 <= self.shift_per_step <= length:
            raise ValidationError(
                f"shift_per_step must lie in 1..{length} (shorter than the shortest edge), "
                f"got {self.shift_per_step}"
            )
        if self.n_steps < 0:
            raise ValidationError(f"n_steps must be non-negative, got {self.n_steps}")
        if not 0 <= self.init_count <= length:
            raise ValidationError(f"init_count must lie in 0..{length}, got {self.init_count}")
        if not 0 <= self.init_low <= self.init_high:
            raise ValidationError(
                f"initial value bounds must satisfy 0 <= low <= high, got {self.init_low}..{self.init_high}"
            )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class EdgeState:
    """Segment values per edge, each ordered tail -> head."""

    segments: tuple[np.ndarray, ...] = field(repr=False)

    def total_mass(self) -> float:
        return float(sum(seg.sum() for seg in self.segments))

    def scaled(self, factor: float) -> "EdgeState":
        return EdgeState(tuple(seg * factor for seg in self.segments))

    def __add__(self, other: "EdgeState") -> "EdgeState":
        return EdgeState(tuple(a + b for a, b in zip(self.segments, other.segments)))


@dataclass(frozen=True)
class VertexSeries:
    """(n_steps + 1) x |V| quantities measured at the vertices, one row per step."""

    measurements: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.measurements.shape[0]

    @property
    def n_vertices(self) -> int:
        return self.measurements.shape[1]


def init_edge_state(edges: EdgeList, config: SimulationConfig, rng: np.random.Generator) -> EdgeState:
    """
    Draw the initial condition.

    On every edge, `init_count` segments chosen without replacement receive
    independent draws from the discrete uniform {init_low, ..., init_high};
    the remaining segments are zero.
    """
    config.validate(min_length=int(edges.lengths.min()) if len(edges) else None)
    segments = []
    for edge in edges:
        values = np.zeros(edge.length, dtype=np.float64)
        positions = rng.choice(edge.length, size=config.init_count, replace=False)
        values[positions] = rng.integers(config.init_low, config.init_high + 1, size=config.init_count)
        segments.append(values)
    return EdgeState(tuple(segments))


def advect_step(
    state: EdgeState,
    edges: EdgeList,
    transition: EdgeTransitionMatrix,
    shift: int,
) -> tuple[EdgeState, np.ndarray]:
    """
    Advance the state by one step.

    Returns:
        (new state, vertex measurement) where measurement[v] is the quantity that
        crossed vertex v during the step
    """
    if len(state.segments) != len(edges) or transition.n_edges != len(edges):
        raise ValidationError(
            f"state has {len(state.segments)} edges, graph has {len(edges)}, "
            f"transition matrix has {transition.n_edges}"
        )
    for index, (seg, edge) in enumerate(zip(state.segments, edges)):
        if seg.shape != (edge.length,):
            raise ValidationError(f"edge {index + 1} holds {seg.shape} segments, expected ({edge.length},)")
        if np.any(seg < 0):
            raise ValidationError(f"edge {index + 1} holds negative quantities")
    if len(edges) and not 1 <= shift <= int(edges.lengths.min()):
        raise ValidationError(f"shift {shift} must lie in 1..{int(edges.lengths.min())}")

    measurement = np.zeros(edges.n_vertices, dtype=np.float64)
    if not len(edges):
        return state, measurement

    outflow = np.stack([seg[-shift:] for seg in state.segments])
    inflow = transition.entries @ outflow

    segments = []
    for seg, incoming in zip(state.segments, inflow):
        moved = np.empty_like(seg)
        moved[shift:] = seg[: seg.shape[0] - shift]
        moved[:shift] = incoming
        segments.append(moved)

    np.add.at(measurement, edges.heads, outflow.sum(axis=1))
    return EdgeState(tuple(segments)), measurement


def simulate_series(
    edges: EdgeList,
    transition: EdgeTransitionMatrix,
    config: SimulationConfig,
    rng: np.random.Generator | None = None,
) -> VertexSeries:
    """Initialise and run n_steps + 1 steps, stacking one measurement row per step."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    state = init_edge_state(edges, config, rng)
    rows = []
    for _ in range(config.n_steps + 1):
        state, measurement = advect_step(state, edges, transition, config.shift_per_step)
        rows.append(measurement)
    return VertexSeries(np.stack(rows))


def _simulate_one(args: tuple[EdgeList, np.ndarray, SimulationConfig, np.random.SeedSequence]) -> np.ndarray:
    edges, entries, config, seed_seq = args
    series = simulate_series(edges, EdgeTransitionMatrix(entries), config, np.random.default_rng(seed_seq))
    return series.measurements


def simulate_batch(graph: Graph, config: SimulationConfig, n_series: int, workers: int = 1) -> list[VertexSeries]:
    """
    Simulate independent series with per-series generators derived from (seed, index).

    The result does not depend on `workers`.
    """
    if n_series < 0:
        raise ValidationError(f"number of series must be non-negative, got {n_series}")
    edges = graph.edge_list(config.segments_per_edge)
    transition = graph.transition
    children = np.random.SeedSequence(config.seed).spawn(n_series)
    tasks = [(edges, transition.entries, config, child) for child in children]

    logger.info("simulating %d series on %s with %d worker(s)", n_series, graph.name, workers)
    if workers > 1 and n_series > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_one, tasks, chunksize=max(1, n_series // (4 * workers))))
    else:
        results = [_simulate_one(task) for task in tasks]
    return [VertexSeries(measurements) for measurements in results]
