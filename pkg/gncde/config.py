"""
Model configuration and the vertex mixing matrices used for informedness.

The informed matrix defaults to W^T + I, where W is the weighted vertex adjacency:
transposed so that row m gathers from the upstream neighbours n of m, plus a
self-loop so each node keeps its own signal.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Any

import numpy as np

from errors import ValidationError
from topology import VertexAdjacency

CONTROL_CHANNELS = 2  # [time, observation]


class InnerMechanism(str, Enum):
    IDENTITY = "identity"
    INFORMED = "informed"
    AGC = "agc"


class OuterMechanism(str, Enum):
    IDENTITY = "identity"
    INFORMED = "informed"


MATRIX_FORMS = ("weighted", "binary", "symmetric")
ORIENTATIONS = ("in", "out")
INTERPOLATIONS = ("cubic", "linear")
ACTIVATIONS = ("tanh", "identity")

Matrix = tuple[tuple[float, ...], ...]


def vertex_mixing_matrix(
    adjacency: VertexAdjacency | np.ndarray,
    form: str = "weighted",
    orientation: str = "in",
    self_loop: bool = True,
) -> np.ndarray:
    """
    Build an informed |V| x |V| matrix from a graph.

    Args:
        adjacency: Split-weight adjacency W
        form: "weighted" keeps split weights, "binary" keeps 0/1 connectivity,
              "symmetric" treats every edge as undirected (0/1)
        orientation: "in" returns W^T (a node reads its upstream neighbours),
                     "out" returns W
        self_loop: add the identity
    """
    weights = adjacency.weights if isinstance(adjacency, VertexAdjacency) else np.asarray(adjacency, dtype=np.float64)
    if form not in MATRIX_FORMS:
        raise ValidationError(f"unknown informed matrix form '{form}', expected one of {MATRIX_FORMS}")
    if orientation not in ORIENTATIONS:
        raise ValidationError(f"unknown orientation '{orientation}', expected one of {ORIENTATIONS}")

    if form == "weighted":
        matrix = weights.copy()
    elif form == "binary":
        matrix = (weights > 0).astype(np.float64)
    else:
        matrix = ((weights > 0) | (weights.T > 0)).astype(np.float64)
    if orientation == "in":
        matrix = matrix.T.copy()
    if self_loop:
        matrix = matrix + np.eye(matrix.shape[0])
    return matrix


def _as_matrix(value: Any) -> Matrix | None:
    if value is None:
        return None
    array = np.asarray(value, dtype=np.float64)
    return tuple(tuple(float(x) for x in row) for row in array)


@dataclass(frozen=True)
class ModelConfig:
    """Everything that determines the architecture and the parameter count."""

    n_vertices: int
    d_h: int = 16
    d_z: int = 16
    hidden_width: int = 32
    n_layers: int = 3
    inner_mech: InnerMechanism = InnerMechanism.IDENTITY
    outer_mech: OuterMechanism = OuterMechanism.IDENTITY
    agc_embed_dim: int = 8
    a_inner: Matrix | None = None
    a_outer: Matrix | None = None
    substeps: int = 2
    interpolation: str = "cubic"
    activation: str = "tanh"
    horizon: int = 24
    input_length: int = 25
    informed_form: str = "weighted"
    informed_orientation: str = "in"
    informed_self_loop: bool = True

    def __post_init__(self):
        object.__setattr__(self, "inner_mech", InnerMechanism(self.inner_mech))
        object.__setattr__(self, "outer_mech", OuterMechanism(self.outer_mech))
        object.__setattr__(self, "a_inner", _as_matrix(self.a_inner))
        object.__setattr__(self, "a_outer", _as_matrix(self.a_outer))
        self.validate()

    @property
    def d_x(self) -> int:
        return CONTROL_CHANNELS

    @property
    def inner_matrix(self) -> np.ndarray | None:
        return None if self.a_inner is None else np.array(self.a_inner)

    @property
    def outer_matrix(self) -> np.ndarray | None:
        return None if self.a_outer is None else np.array(self.a_outer)

    def validate(self) -> None:
        for name in ("n_vertices", "d_h", "d_z", "hidden_width", "substeps", "horizon", "agc_embed_dim"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.input_length < 2:
            raise ValidationError(f"input_length must be at least 2, got {self.input_length}")
        if self.n_layers not in (2, 3):
            raise ValidationError(f"n_layers must be 2 or 3, got {self.n_layers}")
        if self.interpolation not in INTERPOLATIONS:
            raise ValidationError(f"interpolation must be one of {INTERPOLATIONS}, got '{self.interpolation}'")
        if self.activation not in ACTIVATIONS:
            raise ValidationError(f"activation must be one of {ACTIVATIONS}, got '{self.activation}'")

        for label, matrix, informed in (
            ("a_inner", self.a_inner, self.inner_mech is InnerMechanism.INFORMED),
            ("a_outer", self.a_outer, self.outer_mech is OuterMechanism.INFORMED),
        ):
            if informed and matrix is None:
                raise ValidationError(f"{label} is required when that mechanism is informed")
            if not informed and matrix is not None:
                raise ValidationError(f"{label} given but that mechanism is not informed")
            if matrix is not None and np.shape(matrix) != (self.n_vertices, self.n_vertices):
                raise ValidationError(
                    f"{label} has shape {np.shape(matrix)}, expected ({self.n_vertices}, {self.n_vertices})"
                )

    def with_mechanisms(
        self,
        inner: InnerMechanism | str,
        outer: OuterMechanism | str,
        adjacency: VertexAdjacency | np.ndarray | None = None,
    ) -> "ModelConfig":
        """Copy with new mechanisms; informed matrices are rebuilt from `adjacency`."""
        inner, outer = InnerMechanism(inner), OuterMechanism(outer)
        needs_graph = InnerMechanism.INFORMED is inner or OuterMechanism.INFORMED is outer
        if needs_graph and adjacency is None:
            raise ValidationError("an adjacency is needed to build informed matrices")
        matrix = (
            vertex_mixing_matrix(adjacency, self.informed_form, self.informed_orientation, self.informed_self_loop)
            if needs_graph
            else None
        )
        return replace(
            self,
            inner_mech=inner,
            outer_mech=outer,
            a_inner=matrix if inner is InnerMechanism.INFORMED else None,
            a_outer=matrix if outer is OuterMechanism.INFORMED else None,
        )

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["inner_mech"] = self.inner_mech.value
        data["outer_mech"] = self.outer_mech.value
        for key in ("a_inner", "a_outer"):
            if data[key] is not None:
                data[key] = [list(row) for row in data[key]]
        return data
