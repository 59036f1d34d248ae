from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from advection import SimulationConfig, build_dataset, simulate_batch
from gncde import InnerMechanism, ModelConfig, OuterMechanism
from topology import A_V4, A_V10, Graph, VertexAdjacency


@pytest.fixture
def g4() -> Graph:
    return Graph(VertexAdjacency(A_V4), name="g4")


@pytest.fixture
def g10() -> Graph:
    return Graph(VertexAdjacency(A_V10), name="g10")


@pytest.fixture
def two_cycle() -> Graph:
    return Graph(VertexAdjacency(np.array([[0.0, 1.0], [1.0, 0.0]])), name="two-cycle")


def small_config(
    n_vertices: int = 4,
    inner: InnerMechanism | str = "identity",
    outer: OuterMechanism | str = "identity",
    adjacency: np.ndarray | None = None,
    **overrides,
) -> ModelConfig:
    """A model small enough for finite differences and quick training."""
    fields = {"d_h": 3, "d_z": 3, "hidden_width": 4, "substeps": 1, "agc_embed_dim": 2}
    fields.update(overrides)
    base = ModelConfig(n_vertices=n_vertices, **fields)
    if adjacency is None:
        adjacency = A_V4 if n_vertices == 4 else np.eye(n_vertices, k=1)
    return base.with_mechanisms(inner, outer, adjacency)


@pytest.fixture
def tiny_dataset(g4):
    """Twenty simulated series on the 4-node graph with short edges."""
    config = SimulationConfig(segments_per_edge=12, shift_per_step=2, init_count=6, seed=7)
    return build_dataset(simulate_batch(g4, config, 20), metadata={"seed": 7})


@st.composite
def row_stochastic(draw, min_vertices: int = 2, max_vertices: int = 6) -> np.ndarray:
    """A random split-weight adjacency: every row sums to 1 or is a sink."""
    n = draw(st.integers(min_vertices, max_vertices))
    weights = np.zeros((n, n))
    for u in range(n):
        targets = [v for v in range(n) if v != u and draw(st.booleans())]
        if not targets:
            continue
        raw = np.array([draw(st.integers(1, 9)) for _ in targets], dtype=np.float64)
        weights[u, targets] = raw / raw.sum()
    return weights
