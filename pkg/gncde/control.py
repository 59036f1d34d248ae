"""
Control paths built from observation windows.

Each node gets two channels, [time, observation], interpolated through unit-spaced
knots t_0 ... t_{K-1}. The natural cubic spline (zero second derivative at both ends)
is the default; piecewise-linear interpolation is the cheaper alternative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from errors import ValidationError
from autodiff import Tensor


@dataclass(frozen=True)
class ControlPath:
    """Interpolant of a batch of windows, observations shaped (K, B, |V|)."""

    times: np.ndarray = field(repr=False)
    observations: np.ndarray = field(repr=False)
    scheme: str = "cubic"
    spline: CubicSpline | None = field(default=None, repr=False)

    @property
    def n_intervals(self) -> int:
        return self.times.shape[0] - 1

    def _interval(self, t: float) -> int:
        index = int(np.searchsorted(self.times, t, side="right")) - 1
        return min(max(index, 0), self.n_intervals - 1)

    def _with_time(self, time_channel: float, observation: np.ndarray) -> np.ndarray:
        time = np.full_like(observation, time_channel)
        return np.stack([time, observation], axis=-1)

    def value(self, t: float) -> np.ndarray:
        """X(t) shaped (B, |V|, 2)."""
        if self.spline is not None:
            observation = self.spline(t)
        else:
            i = self._interval(t)
            fraction = (t - self.times[i]) / (self.times[i + 1] - self.times[i])
            observation = self.observations[i] + fraction * (self.observations[i + 1] - self.observations[i])
        return self._with_time(t, np.asarray(observation, dtype=np.float64))

    def derivative(self, t: float, interval: int | None = None) -> np.ndarray:
        """
        dX/dt(t) shaped (B, |V|, 2).

        `interval` pins the piece used at a knot; the linear scheme is discontinuous there.
        """
        i = self._interval(t) if interval is None else interval
        if self.spline is not None:
            t = min(max(t, self.times[i]), self.times[i + 1])
            observation = self.spline(t, 1)
        else:
            observation = (self.observations[i + 1] - self.observations[i]) / (self.times[i + 1] - self.times[i])
        return self._with_time(1.0, np.asarray(observation, dtype=np.float64))

    def derivative_tensor(self, t: float, interval: int | None = None) -> Tensor:
        return Tensor(self.derivative(t, interval))


def build_control_path(window: np.ndarray, scheme: str = "cubic") -> ControlPath:
    """
    Interpolate input windows.

    Args:
        window: K x |V| for one sample or B x K x |V| for a batch
        scheme: "cubic" (natural spline) or "linear"
    """
    window = np.asarray(window, dtype=np.float64)
    if window.ndim == 2:
        window = window[None]
    if window.ndim != 3 or window.shape[1] < 2:
        raise ValidationError(f"window must be (B, K>=2, |V|) or (K, |V|), got {window.shape}")
    if not np.all(np.isfinite(window)):
        raise ValidationError("input window contains NaN or Inf")

    observations = np.transpose(window, (1, 0, 2)).copy()
    times = np.arange(observations.shape[0], dtype=np.float64)
    if scheme == "cubic":
        spline = CubicSpline(times, observations, axis=0, bc_type="natural")
        return ControlPath(times, observations, scheme, spline)
    if scheme == "linear":
        return ControlPath(times, observations, scheme)
    raise ValidationError(f"unknown interpolation scheme '{scheme}'")
