"""Adaptive-moment optimizer and global-norm gradient clipping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from errors import NumericAbortError
from .tensor import Tensor


@dataclass
class OptimizerState:
    """First/second moment buffers keyed by parameter name, plus the step counter."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def hyperparameters(self) -> dict[str, float]:
        return {"lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps}


def adam_step(params: Mapping[str, Tensor], grads: Mapping[str, np.ndarray], state: OptimizerState) -> None:
    """
    One bias-corrected adaptive-moment update, in place.

    Raises:
        NumericAbortError: a gradient holds NaN or Inf; nothing is updated
    """
    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            raise NumericAbortError("non-finite gradient", parameter=name, step=state.step + 1)

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for name, param in params.items():
        grad = grads.get(name)
        if grad is None:
            grad = np.zeros_like(param.data)
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(param.data)
            v = np.zeros_like(param.data)
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad * grad
        state.m[name], state.v[name] = m, v
        param.data = param.data - state.lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)


class Adam:
    """Stateful wrapper binding adam_step to a named parameter collection."""

    def __init__(
        self,
        params: Mapping[str, Tensor],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = params
        self.state = OptimizerState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)

    def zero_grad(self) -> None:
        for param in self.params.values():
            param.zero_grad()

    def step(self) -> None:
        grads = {name: p.grad for name, p in self.params.items() if p.grad is not None}
        adam_step(self.params, grads, self.state)


def clip_grad_norm(params: Mapping[str, Tensor], max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most max_norm; returns the norm before clipping."""
    total = 0.0
    for name in sorted(params):
        grad = params[name].grad
        if grad is not None:
            total += float(np.sum(grad * grad))
    norm = math.sqrt(total)
    if not math.isfinite(norm):
        raise NumericAbortError("non-finite gradient norm")
    if norm > max_norm > 0:
        factor = max_norm / norm
        for param in params.values():
            if param.grad is not None:
                param.grad = param.grad * factor
    return norm
