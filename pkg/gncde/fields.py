"""
The two vector fields and the (optionally informed) contraction coupling them.

Shapes carry a leading batch axis B:
    H: (B, |V|, d_h)   f(H): (B, |V|, d_h, d_x)
    Z: (B, |V|, d_z)   g(Z): (B, |V|, d_z, d_h)
"""

from __future__ import annotations

from autodiff import Tensor, contract, tanh
from errors import ValidationError
from .config import ModelConfig
from .mechanisms import InnerMixer, inner_mixer, linear, mix_nodes
from .params import GNCDEParams, mixing_position


def activation(config: ModelConfig):
    if config.activation == "identity":
        return lambda x: x
    return tanh


def _check_state(x: Tensor, config: ModelConfig, width: int, label: str) -> None:
    if x.ndim != 3 or x.shape[1:] != (config.n_vertices, width):
        raise ValidationError(f"{label} must be (B, {config.n_vertices}, {width}), got {x.shape}")


def vector_field_f(config: ModelConfig, params: GNCDEParams, hidden: Tensor) -> Tensor:
    """Per-node MLP d_h -> ... -> d_h * d_x; no mixing across nodes."""
    _check_state(hidden, config, config.d_h, "H")
    act = activation(config)
    x = hidden
    for layer in range(config.n_layers):
        x = linear(x, params[f"f.{layer}.weight"], params[f"f.{layer}.bias"])
        if layer < config.n_layers - 1:
            x = act(x)
    batch = hidden.shape[0]
    return x.reshape(batch, config.n_vertices, config.d_h, config.d_x)


def vector_field_g(
    config: ModelConfig,
    params: GNCDEParams,
    state: Tensor,
    mixer: InnerMixer | None = None,
) -> Tensor:
    """
    Layered map g_last . mix . g_(L-1) ... g_1 with the inner mechanism owning the
    layer at the mixing position.
    """
    _check_state(state, config, config.d_z, "Z")
    mixer = mixer or inner_mixer(config)
    act = activation(config)
    position = mixing_position(config)
    x = state
    for layer in range(config.n_layers):
        prefix = f"g.{layer}"
        if layer == position:
            x = mixer.layer(params, prefix, x, act)
        elif layer < config.n_layers - 1:
            x = act(linear(x, params[f"{prefix}.weight"], params[f"{prefix}.bias"]))
        else:
            x = linear(x, params[f"{prefix}.weight"], params[f"{prefix}.bias"])
    batch = state.shape[0]
    return x.reshape(batch, config.n_vertices, config.d_z, config.d_h)


def control_contraction(field: Tensor, d_control: Tensor) -> Tensor:
    """(dH/dt)[b, n, h] = sum_x f[b, n, h, x] (dX/dt)[b, n, x]."""
    return contract("bnhx,bnx->bnh", field, d_control)


def informed_contraction(field: Tensor, matrix: Tensor | None, d_hidden: Tensor) -> Tensor:
    """
    (dZ/dt)[b, k, z] = sum_h g[b, k, z, h] (A dH/dt)[b, k, h].

    With `matrix` None (identity outer mechanism) this is the plain coupling.
    """
    if matrix is not None:
        if matrix.shape != (d_hidden.shape[1], d_hidden.shape[1]):
            raise ValidationError(
                f"outer matrix {matrix.shape} does not fit {d_hidden.shape[1]} vertices"
            )
        d_hidden = mix_nodes(matrix, d_hidden)
    if field.ndim != 4 or field.shape[:2] != d_hidden.shape[:2] or field.shape[3] != d_hidden.shape[2]:
        raise ValidationError(f"g(Z) shape {field.shape} does not match dH/dt shape {d_hidden.shape}")
    return contract("bkzh,bkh->bkz", field, d_hidden)
