"""
Weighted directed graphs and their deterministic edge enumeration.

A graph is given by a vertex adjacency matrix of split proportions: entry (u, v)
is the fraction of the quantity arriving at u that leaves along the edge u -> v.
Rows sum to 1 (the vertex has outgoing edges) or to 0 (a sink).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from errors import ValidationError

ROW_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class VertexAdjacency:
    """Dense |V| x |V| matrix of split proportions."""

    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        self.validate()

    @property
    def n_vertices(self) -> int:
        return self.weights.shape[0]

    def validate(self) -> None:
        weights = self.weights
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1] or weights.shape[0] == 0:
            raise ValidationError(f"adjacency must be a non-empty square matrix, got shape {weights.shape}")
        if not np.all(np.isfinite(weights)):
            raise ValidationError("adjacency contains non-finite entries")
        if np.any(weights < 0) or np.any(weights > 1):
            raise ValidationError("adjacency entries must lie in [0, 1]")
        if np.any(np.diag(weights) != 0):
            raise ValidationError("adjacency diagonal must be zero (self-loops are not supported)")
        for u, total in enumerate(weights.sum(axis=1)):
            if abs(total - 1.0) > ROW_SUM_TOLERANCE and abs(total) > ROW_SUM_TOLERANCE:
                raise ValidationError(
                    f"row {u + 1} of the adjacency sums to {total!r}; expected 1 (split) or 0 (sink)"
                )

    def sinks(self) -> list[int]:
        """Vertices without outgoing edges."""
        return [u for u in range(self.n_vertices) if not np.any(self.weights[u] > 0)]


@dataclass(frozen=True)
class Edge:
    """A directed edge u -> v carrying the split weight p and a length in segments."""

    tail: int
    head: int
    split_weight: float
    length: int


@dataclass(frozen=True)
class EdgeList:
    """Edges in row-major order of the adjacency (by tail, then head)."""

    edges: tuple[Edge, ...]
    n_vertices: int

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges)

    def __getitem__(self, index: int) -> Edge:
        return self.edges[index]

    @property
    def tails(self) -> np.ndarray:
        return np.array([e.tail for e in self.edges], dtype=np.int64)

    @property
    def heads(self) -> np.ndarray:
        return np.array([e.head for e in self.edges], dtype=np.int64)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.edges], dtype=np.int64)

    def outgoing(self, vertex: int) -> list[int]:
        """Indices of the edges whose tail is `vertex`."""
        return [i for i, e in enumerate(self.edges) if e.tail == vertex]

    def incoming(self, vertex: int) -> list[int]:
        """Indices of the edges whose head is `vertex`."""
        return [i for i, e in enumerate(self.edges) if e.head == vertex]


def edges_from_adjacency(
    adj: VertexAdjacency,
    default_length: int,
    lengths: Sequence[int] | None = None,
) -> EdgeList:
    """
    Enumerate one edge per strictly positive adjacency entry, row-major.

    Args:
        adj: Validated vertex adjacency
        default_length: Segment count given to every edge
        lengths: Optional per-edge segment counts aligned with the enumeration order

    Returns:
        The EdgeList of the graph
    """
    adj.validate()
    if default_length < 1:
        raise ValidationError(f"edge length must be a positive segment count, got {default_length}")

    pairs = [
        (u, v)
        for u in range(adj.n_vertices)
        for v in range(adj.n_vertices)
        if adj.weights[u, v] > 0
    ]
    if lengths is None:
        lengths = [default_length] * len(pairs)
    if len(lengths) != len(pairs):
        raise ValidationError(f"{len(lengths)} edge lengths given for a graph with {len(pairs)} edges")
    if any(int(n) < 1 for n in lengths):
        raise ValidationError("every edge length must be a positive segment count")

    edges = tuple(
        Edge(tail=u, head=v, split_weight=float(adj.weights[u, v]), length=int(n))
        for (u, v), n in zip(pairs, lengths)
    )
    return EdgeList(edges=edges, n_vertices=adj.n_vertices)
