"""
Graph mechanisms.

The inner mechanism owns the g layer at the mixing position: the plain layer
(identity), the plain layer followed by a fixed node-mixing matrix (informed), or
an adaptive graph convolution in its place (AGC). The outer mechanism maps dH/dt
before it is contracted with g(Z).
"""

from __future__ import annotations

from typing import Protocol

import numpy as np

from autodiff import Tensor, contract, relu, softmax
from errors import ValidationError
from .config import InnerMechanism, ModelConfig, OuterMechanism
from .params import GNCDEParams


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Per-node affine map on (B, |V|, n_in)."""
    return contract("bni,io->bno", x, weight) + bias


def mix_nodes(matrix: Tensor, x: Tensor) -> Tensor:
    """Left-multiply the node axis: out[b, m] = sum_n matrix[m, n] x[b, n]."""
    return contract("mn,bnd->bmd", matrix, x)


def agc_adjacency(embedding: Tensor) -> Tensor:
    """softmax(relu(E E^T)) row-wise."""
    return softmax(relu(contract("nd,md->nm", embedding, embedding)), axis=1)


def agc_layer(embedding: Tensor, x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """(I + A~) X W + b with A~ the adaptive adjacency of the node embedding."""
    adjacency = agc_adjacency(embedding)
    return linear(x + mix_nodes(adjacency, x), weight, bias)


class InnerMixer(Protocol):
    """
    Computes the g layer at the mixing position.

    To add a mechanism, implement layer() with this signature.
    """

    def layer(self, params: GNCDEParams, prefix: str, x: Tensor, activate) -> Tensor:
        ...


class IdentityMixer:
    def layer(self, params: GNCDEParams, prefix: str, x: Tensor, activate) -> Tensor:
        return activate(linear(x, params[f"{prefix}.weight"], params[f"{prefix}.bias"]))


class InformedMixer:
    def __init__(self, matrix: np.ndarray):
        self.matrix = Tensor(matrix)

    def layer(self, params: GNCDEParams, prefix: str, x: Tensor, activate) -> Tensor:
        hidden = activate(linear(x, params[f"{prefix}.weight"], params[f"{prefix}.bias"]))
        return mix_nodes(self.matrix, hidden)


class AGCMixer:
    def layer(self, params: GNCDEParams, prefix: str, x: Tensor, activate) -> Tensor:
        return activate(
            agc_layer(params["g.agc.embedding"], x, params[f"{prefix}.weight"], params[f"{prefix}.bias"])
        )


def inner_mixer(config: ModelConfig) -> InnerMixer:
    if config.inner_mech is InnerMechanism.INFORMED:
        if config.a_inner is None:
            raise ValidationError("informed inner mechanism needs a_inner")
        return InformedMixer(config.inner_matrix)
    if config.inner_mech is InnerMechanism.AGC:
        return AGCMixer()
    return IdentityMixer()


def outer_matrix(config: ModelConfig) -> Tensor | None:
    """The fixed matrix applied to dH/dt, or None for the identity mechanism."""
    if config.outer_mech is OuterMechanism.INFORMED:
        if config.a_outer is None:
            raise ValidationError("informed outer mechanism needs a_outer")
        return Tensor(config.outer_matrix)
    return None
