"""
Parameter checkpoints.

Header fields: parameter names and shapes (the storage array table), the optimizer
step counter and hyperparameters, plus caller metadata. Arrays are stored as
`param/<name>`, `adam.m/<name>`, `adam.v/<name>` and any caller extras.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping

import numpy as np

from errors import ValidationError
from storage import read_blob, write_blob
from .optim import OptimizerState
from .tensor import Tensor

FORMAT_VERSION = 1


def save_checkpoint(
    path: str | Path,
    params: Mapping[str, Tensor],
    optimizer: OptimizerState | None = None,
    metadata: dict[str, Any] | None = None,
    extra_arrays: Mapping[str, np.ndarray] | None = None,
) -> None:
    arrays: dict[str, np.ndarray] = {f"param/{name}": p.data for name, p in params.items()}
    header: dict[str, Any] = {"version": FORMAT_VERSION, "metadata": metadata or {}}
    if optimizer is not None:
        header["optimizer"] = {"step": optimizer.step, **optimizer.hyperparameters()}
        for name in params:
            if name in optimizer.m:
                arrays[f"adam.m/{name}"] = optimizer.m[name]
                arrays[f"adam.v/{name}"] = optimizer.v[name]
    for name, array in (extra_arrays or {}).items():
        arrays[f"extra/{name}"] = array
    write_blob(path, "checkpoint", header, arrays)


def load_checkpoint(
    path: str | Path,
) -> tuple[dict[str, np.ndarray], OptimizerState | None, dict[str, Any], dict[str, np.ndarray]]:
    """
    Returns:
        (parameter arrays, optimizer state or None, metadata, extra arrays)
    """
    header, arrays = read_blob(path, "checkpoint")
    if header.get("version") != FORMAT_VERSION:
        raise ValidationError(f"{path}: checkpoint version {header.get('version')} is not {FORMAT_VERSION}")

    params, extras, m, v = {}, {}, {}, {}
    for key, array in arrays.items():
        group, _, name = key.partition("/")
        target = {"param": params, "adam.m": m, "adam.v": v, "extra": extras}.get(group)
        if target is None:
            raise ValidationError(f"{path}: unexpected array '{key}'")
        target[name] = array

    optimizer = None
    if "optimizer" in header:
        settings = header["optimizer"]
        optimizer = OptimizerState(
            lr=settings["lr"],
            beta1=settings["beta1"],
            beta2=settings["beta2"],
            eps=settings["eps"],
            step=settings["step"],
            m=m,
            v=v,
        )
    return params, optimizer, header.get("metadata", {}), extras


def assign_parameters(params: Mapping[str, Tensor], arrays: Mapping[str, np.ndarray]) -> None:
    """Copy loaded arrays into existing parameters, naming the first mismatch."""
    missing = set(params) - set(arrays)
    unexpected = set(arrays) - set(params)
    if missing or unexpected:
        raise ValidationError(
            f"checkpoint parameters do not match the model: missing {sorted(missing)}, "
            f"unexpected {sorted(unexpected)}"
        )
    for name, param in params.items():
        if arrays[name].shape != param.shape:
            raise ValidationError(
                f"parameter '{name}' has shape {list(arrays[name].shape)} in the checkpoint, "
                f"{list(param.shape)} in the model"
            )
    for name, param in params.items():
        param.data = np.array(arrays[name], dtype=np.float64)
