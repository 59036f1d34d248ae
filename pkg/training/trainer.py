"""
The training loop.

Each optimisation step follows the same four stages:
    FORWARD  - integrate the GNCDE over a minibatch
    LOSS     - mean absolute error against the target windows
    BACKWARD - backpropagate through the unrolled solver
    UPDATE   - clip and take an adaptive-moment step
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from advection import Dataset
from autodiff import (
    Adam,
    OptimizerState,
    Tape,
    Tensor,
    abs_,
    assign_parameters,
    clip_grad_norm,
    load_checkpoint,
    mean,
    save_checkpoint,
    sub,
)
from errors import NumericAbortError, ValidationError
from gncde import GNCDEParams, ModelConfig, copy_params, forward_batch, init_params
from metrics import MetricsLog
from .config import TrainConfig, split_indices

logger = logging.getLogger(__name__)


def mae(pred: np.ndarray | Tensor, target: np.ndarray | Tensor) -> float:
    """Mean over all entries of |pred - target|."""
    pred = pred.data if isinstance(pred, Tensor) else np.asarray(pred, dtype=np.float64)
    target = target.data if isinstance(target, Tensor) else np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValidationError(f"prediction shape {pred.shape} does not match target shape {target.shape}")
    return float(np.mean(np.abs(pred - target)))


def mae_loss(pred: Tensor, target: np.ndarray) -> Tensor:
    """Differentiable MAE."""
    if pred.shape != np.shape(target):
        raise ValidationError(f"prediction shape {pred.shape} does not match target shape {np.shape(target)}")
    return mean(abs_(sub(pred, Tensor(target))))


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_mae: float
    val_mae: float | None


@dataclass
class TrainingState:
    """Everything needed to resume a run exactly where it stopped."""

    params: GNCDEParams
    optimizer: OptimizerState
    epoch: int = 0
    best_params: dict[str, np.ndarray] = field(default_factory=dict)
    best_score: float = math.inf
    best_epoch: int = 0
    history: list[EpochMetrics] = field(default_factory=list)

    @classmethod
    def fresh(cls, params: GNCDEParams, config: TrainConfig) -> "TrainingState":
        optimizer = OptimizerState(lr=config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.eps)
        return cls(params=params, optimizer=optimizer, best_params=copy_params(params))


@dataclass
class TrainResult:
    params: GNCDEParams  # best-validation parameters
    history: list[EpochMetrics]
    state: TrainingState


def _batches(indices: np.ndarray, batch_size: int) -> list[np.ndarray]:
    return [indices[i:i + batch_size] for i in range(0, len(indices), batch_size)]


def predict(config: ModelConfig, params: GNCDEParams, inputs: np.ndarray, batch_size: int = 64) -> np.ndarray:
    """Predictions for many windows, evaluated without recording a tape."""
    chunks = [
        forward_batch(config, params, inputs[i:i + batch_size]).data
        for i in range(0, inputs.shape[0], batch_size)
    ]
    if not chunks:
        return np.zeros((0, config.horizon, config.n_vertices))
    return np.concatenate(chunks)


def evaluate(config: ModelConfig, params: GNCDEParams, dataset: Dataset, batch_size: int = 64) -> float:
    """Mean of per-sample MAEs, in dataset order."""
    if len(dataset) == 0:
        raise ValidationError("cannot evaluate on an empty split")
    predictions = predict(config, params, dataset.inputs, batch_size)
    per_sample = np.mean(np.abs(predictions - dataset.targets), axis=(1, 2))
    return float(np.mean(per_sample))


def train(
    model_config: ModelConfig,
    params: GNCDEParams,
    dataset: Dataset,
    train_config: TrainConfig,
    log: MetricsLog | None = None,
    state: TrainingState | None = None,
    on_epoch: Callable[[EpochMetrics], None] | None = None,
) -> TrainResult:
    """
    Minibatch training with best-validation model selection.

    Args:
        model_config: Architecture
        params: Parameters to train (updated in place)
        dataset: Full dataset; split deterministically by train_config.seed
        train_config: Hyperparameters
        log: Optional metrics log receiving one record per split and epoch
        state: Resume from this state instead of starting fresh
        on_epoch: Optional callback after every epoch (progress display)

    Returns:
        TrainResult with the best parameters and the per-epoch history
    """
    if len(dataset) == 0:
        raise ValidationError("cannot train on an empty dataset")
    train_idx, val_idx, _ = split_indices(len(dataset), train_config)
    if len(train_idx) == 0:
        raise ValidationError("the training split is empty")
    train_set = dataset.subset(train_idx)
    val_set = dataset.subset(val_idx) if len(val_idx) else None

    state = state or TrainingState.fresh(params, train_config)
    params = state.params
    optimizer = Adam(params, lr=train_config.lr, beta1=train_config.beta1, beta2=train_config.beta2, eps=train_config.eps)
    optimizer.state = state.optimizer
    started = time.perf_counter()

    for epoch in range(state.epoch + 1, train_config.epochs + 1):
        if train_config.patience is not None and epoch - state.best_epoch > train_config.patience and state.best_epoch:
            logger.info("early stop after epoch %d (best %d)", epoch - 1, state.best_epoch)
            break

        order = np.random.default_rng([train_config.seed, epoch]).permutation(len(train_set))
        total, seen = 0.0, 0
        for batch_index, batch in enumerate(_batches(order, train_config.batch_size)):
            optimizer.zero_grad()

            # ============================================
            # FORWARD + LOSS
            # ============================================
            with Tape():
                prediction = forward_batch(model_config, params, train_set.inputs[batch])
                loss = mae_loss(prediction, train_set.targets[batch])
            value = loss.item()
            if not math.isfinite(value):
                raise NumericAbortError(
                    "non-finite training loss", epoch=epoch, batch=batch_index, step=state.optimizer.step + 1
                )

            # ============================================
            # BACKWARD
            # ============================================
            loss.backward()

            # ============================================
            # UPDATE
            # ============================================
            if train_config.clip_norm is not None:
                clip_grad_norm(params, train_config.clip_norm)
            try:
                optimizer.step()
            except NumericAbortError as e:
                raise NumericAbortError(str(e), epoch=epoch, batch=batch_index) from e

            total += value * len(batch)
            seen += len(batch)

        train_mae = total / seen
        val_mae = evaluate(model_config, params, val_set, train_config.batch_size) if val_set is not None else None
        metrics = EpochMetrics(epoch=epoch, train_mae=train_mae, val_mae=val_mae)
        state.history.append(metrics)
        state.epoch = epoch

        score = val_mae if val_mae is not None else train_mae
        if score < state.best_score:
            state.best_score = score
            state.best_epoch = epoch
            state.best_params = copy_params(params)

        wall = time.perf_counter() - started
        if log is not None:
            log.write_epoch(epoch, "train", train_mae, wall)
            if val_mae is not None:
                log.write_epoch(epoch, "val", val_mae, wall)
        logger.info("epoch %d: train MAE %.4f, val MAE %s", epoch, train_mae,
                    f"{val_mae:.4f}" if val_mae is not None else "-")
        if on_epoch is not None:
            on_epoch(metrics)

    best = {name: Tensor(array, requires_grad=True) for name, array in state.best_params.items()}
    return TrainResult(params=best, history=list(state.history), state=state)


# ============================================
# Checkpoints
# ============================================


def checkpoint_save(
    path: str | Path,
    model_config: ModelConfig,
    train_config: TrainConfig,
    state: TrainingState,
) -> None:
    metadata: dict[str, Any] = {
        "model_config": model_config.to_dict(),
        "train_config": train_config.to_dict(),
        "epoch": state.epoch,
        "best_score": state.best_score if math.isfinite(state.best_score) else None,
        "best_epoch": state.best_epoch,
        "history": [asdict(m) for m in state.history],
    }
    extras = {f"best/{name}": array for name, array in state.best_params.items()}
    save_checkpoint(path, state.params, state.optimizer, metadata, extras)


def checkpoint_load(path: str | Path, model_config: ModelConfig) -> tuple[TrainingState, dict[str, Any]]:
    """
    Restore a TrainingState for `model_config`.

    Raises:
        ValidationError: the checkpoint's parameters do not fit the configuration
    """
    arrays, optimizer, metadata, extras = load_checkpoint(path)
    params = init_params(model_config, seed=0)
    assign_parameters(params, arrays)

    best = {name[len("best/"):]: array for name, array in extras.items() if name.startswith("best/")}
    best_params = init_params(model_config, seed=0)
    assign_parameters(best_params, best)

    best_score = metadata.get("best_score")
    state = TrainingState(
        params=params,
        optimizer=optimizer or OptimizerState(),
        epoch=int(metadata.get("epoch", 0)),
        best_params=copy_params(best_params),
        best_score=math.inf if best_score is None else float(best_score),
        best_epoch=int(metadata.get("best_epoch", 0)),
        history=[EpochMetrics(**m) for m in metadata.get("history", [])],
    )
    return state, metadata
