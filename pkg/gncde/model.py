"""
The coupled NCDE pair.

    dH = f(H) dX          (temporal, per node)
    dZ = g(Z) A dH        (spatial, A the outer mechanism)

Both are advanced jointly with fixed-step RK4 on the knot grid, each knot interval
split into `substeps` steps. Steps never straddle a knot, so the piecewise-linear
control's derivative jumps never fall inside a step. Gradients come from
backpropagating through the unrolled steps.
"""

from __future__ import annotations

import logging

import numpy as np

from autodiff import Tensor, scale, transpose
from errors import NumericAbortError, ValidationError
from .config import ModelConfig
from .control import ControlPath, build_control_path
from .fields import control_contraction, informed_contraction, vector_field_f, vector_field_g
from .mechanisms import InnerMixer, inner_mixer, linear, outer_matrix
from .params import GNCDEParams

logger = logging.getLogger(__name__)


def init_states(config: ModelConfig, params: GNCDEParams, x0: Tensor | np.ndarray) -> tuple[Tensor, Tensor]:
    """H(0) = l_H(X(t_0)), Z(0) = l_Z(H(0)), both per-node affine maps."""
    x0 = x0 if isinstance(x0, Tensor) else Tensor(x0)
    hidden = linear(x0, params["init_h.weight"], params["init_h.bias"])
    state = linear(hidden, params["init_z.weight"], params["init_z.bias"])
    return hidden, state


def derivatives(
    config: ModelConfig,
    params: GNCDEParams,
    hidden: Tensor,
    state: Tensor,
    d_control: Tensor,
    mixer: InnerMixer | None = None,
    matrix: Tensor | None = None,
) -> tuple[Tensor, Tensor]:
    """(dH/dt, dZ/dt) at one instant."""
    d_hidden = control_contraction(vector_field_f(config, params, hidden), d_control)
    d_state = informed_contraction(vector_field_g(config, params, state, mixer), matrix, d_hidden)
    return d_hidden, d_state


def _axpy(x: Tensor, step: float, dx: Tensor) -> Tensor:
    return x + scale(dx, step)


def solve(config: ModelConfig, params: GNCDEParams, control: ControlPath) -> tuple[Tensor, Tensor]:
    """Integrate from t_0 to t_K; returns (H(T), Z(T))."""
    if control.observations.shape[2] != config.n_vertices:
        raise ValidationError(
            f"control has {control.observations.shape[2]} vertices, model expects {config.n_vertices}"
        )
    mixer = inner_mixer(config)
    matrix = outer_matrix(config)
    hidden, state = init_states(config, params, control.value(control.times[0]))

    step_index = 0
    for interval in range(control.n_intervals):
        start = control.times[interval]
        h = (control.times[interval + 1] - start) / config.substeps
        for sub in range(config.substeps):
            t = start + sub * h
            d_begin = control.derivative_tensor(t, interval)
            d_middle = control.derivative_tensor(t + h / 2, interval)
            d_end = control.derivative_tensor(t + h, interval)

            k1h, k1z = derivatives(config, params, hidden, state, d_begin, mixer, matrix)
            k2h, k2z = derivatives(
                config, params, _axpy(hidden, h / 2, k1h), _axpy(state, h / 2, k1z), d_middle, mixer, matrix
            )
            k3h, k3z = derivatives(
                config, params, _axpy(hidden, h / 2, k2h), _axpy(state, h / 2, k2z), d_middle, mixer, matrix
            )
            k4h, k4z = derivatives(
                config, params, _axpy(hidden, h, k3h), _axpy(state, h, k3z), d_end, mixer, matrix
            )
            hidden = hidden + scale(k1h + scale(k2h, 2.0) + scale(k3h, 2.0) + k4h, h / 6)
            state = state + scale(k1z + scale(k2z, 2.0) + scale(k3z, 2.0) + k4z, h / 6)

            step_index += 1
            if not (np.all(np.isfinite(hidden.data)) and np.all(np.isfinite(state.data))):
                raise NumericAbortError("non-finite hidden state during integration", step=step_index, time=t + h)
    return hidden, state


def integrate(config: ModelConfig, params: GNCDEParams, control: ControlPath) -> Tensor:
    """Z(T) shaped (B, |V|, d_z)."""
    return solve(config, params, control)[1]


def readout(config: ModelConfig, params: GNCDEParams, state: Tensor) -> Tensor:
    """Per-node affine map of Z(T) to the horizon, returned as (B, horizon, |V|)."""
    values = linear(state, params["readout.weight"], params["readout.bias"])
    return transpose(values, (0, 2, 1))


def forward_batch(config: ModelConfig, params: GNCDEParams, windows: np.ndarray) -> Tensor:
    """Predictions (B, horizon, |V|) for input windows (B, input_length, |V|)."""
    windows = np.asarray(windows, dtype=np.float64)
    if windows.ndim != 3 or windows.shape[1:] != (config.input_length, config.n_vertices):
        raise ValidationError(
            f"windows must be (B, {config.input_length}, {config.n_vertices}), got {windows.shape}"
        )
    control = build_control_path(windows, config.interpolation)
    return readout(config, params, integrate(config, params, control))


def forward(config: ModelConfig, params: GNCDEParams, window: np.ndarray) -> Tensor:
    """Prediction (horizon, |V|) for one input window (input_length, |V|)."""
    window = np.asarray(window, dtype=np.float64)
    if window.ndim != 2:
        raise ValidationError(f"a single window must be 2-dimensional, got {window.shape}")
    prediction = forward_batch(config, params, window[None])
    return prediction[0]
