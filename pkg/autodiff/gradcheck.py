"""Finite-difference verification of backward gradients."""

from __future__ import annotations

import logging
from typing import Callable, Mapping

import numpy as np

from .tensor import Tape, Tensor

logger = logging.getLogger(__name__)


def grad_check(
    f: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    eps: float = 1e-5,
    floor: float = 1e-8,
) -> float:
    """
    Compare backward gradients with central differences, coordinate by coordinate.

    Args:
        f: Deterministic function of the current parameter values returning a scalar
        params: Parameters to check; their data is perturbed and restored in place
        eps: Perturbation size
        floor: Smallest denominator of the relative error

    Returns:
        max |analytic - numeric| / max(|analytic|, |numeric|, floor) over all coordinates

    Finite differences are wrong across kinks (relu at 0, abs at 0); perturb the
    evaluation point if one sits exactly on a kink.
    """
    for param in params.values():
        param.zero_grad()
    with Tape():
        loss = f()
    loss.backward()
    analytic = {name: p.grad.copy() for name, p in params.items()}

    worst = 0.0
    for name, param in params.items():
        flat = param.data.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            upper = f().item()
            flat[i] = original - eps
            lower = f().item()
            flat[i] = original
            numeric = (upper - lower) / (2.0 * eps)
            exact = analytic[name].reshape(-1)[i]
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
            if error > worst:
                worst = error
                logger.debug("grad_check: %s[%d] analytic=%g numeric=%g", name, i, exact, numeric)
    return worst
