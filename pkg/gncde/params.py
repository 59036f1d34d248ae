"""
Parameter layout, initialisation and counting.

Both vector fields are per-node MLPs whose weights are shared across nodes, so
|V| enters the parameter count only through the AGC node embedding.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from autodiff import Tensor
from .config import InnerMechanism, ModelConfig

GNCDEParams = dict[str, Tensor]


def _widths(n_in: int, n_out: int, config: ModelConfig) -> list[int]:
    return [n_in] + [config.hidden_width] * (config.n_layers - 1) + [n_out]


def mixing_position(config: ModelConfig) -> int:
    """Index of the g layer followed by the inner mixing (replaced by AGC)."""
    return config.n_layers - 2


def parameter_shapes(config: ModelConfig) -> Iterator[tuple[str, tuple[int, ...]]]:
    """Every trainable array, in initialisation order."""
    for prefix, n_in, n_out in (
        ("f", config.d_h, config.d_h * config.d_x),
        ("g", config.d_z, config.d_z * config.d_h),
    ):
        widths = _widths(n_in, n_out, config)
        for layer, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
            yield f"{prefix}.{layer}.weight", (fan_in, fan_out)
            yield f"{prefix}.{layer}.bias", (fan_out,)

    yield "init_h.weight", (config.d_x, config.d_h)
    yield "init_h.bias", (config.d_h,)
    yield "init_z.weight", (config.d_h, config.d_z)
    yield "init_z.bias", (config.d_z,)
    yield "readout.weight", (config.d_z, config.horizon)
    yield "readout.bias", (config.horizon,)
    if config.inner_mech is InnerMechanism.AGC:
        yield "g.agc.embedding", (config.n_vertices, config.agc_embed_dim)


def count_params(config: ModelConfig) -> int:
    """Closed-form trainable scalar count."""

    def linear(n_in: int, n_out: int) -> int:
        return n_in * n_out + n_out

    w, depth = config.hidden_width, config.n_layers
    f = linear(config.d_h, w) + (depth - 2) * linear(w, w) + linear(w, config.d_h * config.d_x)
    g = linear(config.d_z, w) + (depth - 2) * linear(w, w) + linear(w, config.d_z * config.d_h)
    initial = linear(config.d_x, config.d_h) + linear(config.d_h, config.d_z)
    readout = linear(config.d_z, config.horizon)
    embedding = config.n_vertices * config.agc_embed_dim if config.inner_mech is InnerMechanism.AGC else 0
    return f + g + initial + readout + embedding


def init_params(config: ModelConfig, seed: int) -> GNCDEParams:
    """
    Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for affine maps, standard normal for
    the AGC embedding. The embedding uses its own stream, so variants that differ
    only in the inner mechanism start from identical shared weights.
    """
    layer_seq, embed_seq = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(layer_seq)
    embed_rng = np.random.default_rng(embed_seq)

    params: GNCDEParams = {}
    fan_in = 1
    for name, shape in parameter_shapes(config):
        if name == "g.agc.embedding":
            data = embed_rng.standard_normal(shape)
        else:
            if name.endswith(".weight"):
                fan_in = shape[0]
            bound = 1.0 / np.sqrt(fan_in)
            data = rng.uniform(-bound, bound, size=shape)
        params[name] = Tensor(data, requires_grad=True)
    return params


def copy_params(params: GNCDEParams) -> dict[str, np.ndarray]:
    return {name: p.data.copy() for name, p in params.items()}
