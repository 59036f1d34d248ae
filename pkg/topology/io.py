"""
Graph files.

A graph file is a JSON object:

    {
        "n_vertices": 4,
        "adjacency": [[0, 1, 0, 0], ...],
        "edge_length": 100,            # optional, segments per edge
        "edge_lengths": [100, 80, ...] # optional, per edge in row-major order
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

from errors import ValidationError
from .adjacency import EdgeList, VertexAdjacency, edges_from_adjacency
from .incidence import (
    EdgeTransitionMatrix,
    IncidenceMatrix,
    edge_transition_matrix,
    incidence_from_edges,
)


@dataclass(frozen=True)
class Graph:
    """A validated graph with its derived edge structures."""

    adjacency: VertexAdjacency
    edge_length: int | None = None
    edge_lengths: tuple[int, ...] | None = None
    name: str = "graph"

    @property
    def n_vertices(self) -> int:
        return self.adjacency.n_vertices

    def edge_list(self, default_length: int) -> EdgeList:
        """Edges with lengths from the file, falling back to `default_length`."""
        length = self.edge_length if self.edge_length is not None else default_length
        return edges_from_adjacency(self.adjacency, length, self.edge_lengths)

    @cached_property
    def incidence(self) -> IncidenceMatrix:
        # lengths do not enter the incidence matrix
        return incidence_from_edges(self.edge_list(1), self.n_vertices)

    @cached_property
    def transition(self) -> EdgeTransitionMatrix:
        return edge_transition_matrix(self.incidence)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "n_vertices": self.n_vertices,
            "adjacency": self.adjacency.weights.tolist(),
        }
        if self.edge_length is not None:
            data["edge_length"] = self.edge_length
        if self.edge_lengths is not None:
            data["edge_lengths"] = list(self.edge_lengths)
        return data


def graph_from_dict(data: dict[str, Any], name: str = "graph") -> Graph:
    """Validate a decoded graph file."""
    known = {"n_vertices", "adjacency", "edge_length", "edge_lengths"}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown graph keys: {', '.join(sorted(unknown))}")
    if "adjacency" not in data:
        raise ValidationError("graph file has no 'adjacency'")

    try:
        weights = np.array(data["adjacency"], dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"adjacency is not a rectangular numeric array: {e}") from e
    n_vertices = data.get("n_vertices", weights.shape[0] if weights.ndim else 0)
    if weights.ndim != 2 or weights.shape != (n_vertices, n_vertices):
        raise ValidationError(
            f"adjacency shape {weights.shape} does not match n_vertices={n_vertices}"
        )

    edge_length = data.get("edge_length")
    edge_lengths = data.get("edge_lengths")
    graph = Graph(
        adjacency=VertexAdjacency(weights),
        edge_length=int(edge_length) if edge_length is not None else None,
        edge_lengths=tuple(int(n) for n in edge_lengths) if edge_lengths is not None else None,
        name=name,
    )
    # Fail early on inconsistent per-edge lengths.
    graph.edge_list(graph.edge_length or 1)
    return graph


def load_graph(path: str | Path) -> Graph:
    """Read and validate a graph file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ValidationError(f"graph file '{path}' does not exist") from e
    except json.JSONDecodeError as e:
        raise ValidationError(f"graph file '{path}' is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ValidationError(f"graph file '{path}' must contain a JSON object")
    return graph_from_dict(data, name=path.stem)
