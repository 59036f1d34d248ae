"""
Incidence-matrix calculus for the edge transition matrix.

Sign convention: the column of edge e = (u, v, p) holds -p at the tail row u and +1
at the head row v. Under this convention

    A_E = (I-)^T (I^c)+

has rows indexed by the destination edge and columns by the source edge, and
(A_E)[i, j] equals the split weight of e_i whenever head(e_j) == tail(e_i).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from errors import ValidationError
from .adjacency import EdgeList

COLUMN_SUM_TOLERANCE = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class IncidenceMatrix:
    """Signed |V| x |E| vertex incidence matrix."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


class IncidenceSplit(NamedTuple):
    """The three derived forms of an incidence matrix."""

    positive: np.ndarray  # I+
    negative: np.ndarray  # I-
    conservative: np.ndarray  # I^c


@dataclass(frozen=True)
class EdgeTransitionMatrix:
    """|E| x |E| routing operator; rows are destination edges, columns source edges."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))
        self.validate()

    def validate(self) -> None:
        entries = self.entries
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValidationError(f"edge transition matrix must be square, got shape {entries.shape}")
        if np.any(entries < 0) or np.any(entries > 1):
            raise ValidationError("edge transition entries must lie in [0, 1]")
        for j, total in enumerate(entries.sum(axis=0)):
            if abs(total - 1.0) > COLUMN_SUM_TOLERANCE and abs(total) > COLUMN_SUM_TOLERANCE:
                raise ValidationError(
                    f"column {j + 1} of the edge transition matrix sums to {total!r}; "
                    "split weights are inconsistent"
                )

    @property
    def n_edges(self) -> int:
        return self.entries.shape[0]


def incidence_from_edges(edges: EdgeList, n_vertices: int) -> IncidenceMatrix:
    """Build the signed incidence matrix (tail -p, head +1)."""
    entries = np.zeros((n_vertices, len(edges)), dtype=np.float64)
    for j, edge in enumerate(edges):
        for vertex in (edge.tail, edge.head):
            if not 0 <= vertex < n_vertices:
                raise ValidationError(
                    f"edge {j + 1} references vertex {vertex + 1} outside 1..{n_vertices}"
                )
        entries[edge.tail, j] = -edge.split_weight
        entries[edge.head, j] = 1.0
    return IncidenceMatrix(entries)


def split_incidence(inc: IncidenceMatrix) -> IncidenceSplit:
    """Return (I+, I-, I^c) exactly as defined entrywise."""
    entries = inc.entries
    positive = np.where(entries > 0, entries, 0.0)
    negative = np.where(entries < 0, -entries, 0.0)
    conservative = np.where(entries > 0, 1.0, entries)
    return IncidenceSplit(positive=positive, negative=negative, conservative=conservative)


def edge_transition_matrix(inc: IncidenceMatrix) -> EdgeTransitionMatrix:
    """A_E = (I-)^T (I^c)+ ; validated for column sums in {0, 1}."""
    split = split_incidence(inc)
    conservative_positive = np.where(split.conservative > 0, split.conservative, 0.0)
    return EdgeTransitionMatrix(split.negative.T @ conservative_positive)
