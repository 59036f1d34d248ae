"""Training hyperparameters and the deterministic data split."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from errors import ValidationError


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    train_fraction: float = 0.8
    val_fraction: float = 0.1
    test_fraction: float = 0.1
    patience: int | None = None  # epochs without improvement before stopping
    clip_norm: float | None = 10.0
    threshold_factor: float = 1.25  # epochs-to-threshold: val MAE < factor * best

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.epochs < 0:
            raise ValidationError(f"epochs must be non-negative, got {self.epochs}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be at least 1, got {self.batch_size}")
        if self.lr <= 0:
            raise ValidationError(f"learning rate must be positive, got {self.lr}")
        fractions = (self.train_fraction, self.val_fraction, self.test_fraction)
        if any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
            raise ValidationError(f"split fractions must be non-negative and sum to 1, got {fractions}")
        if self.patience is not None and self.patience < 1:
            raise ValidationError(f"patience must be at least 1, got {self.patience}")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise ValidationError(f"clip_norm must be positive, got {self.clip_norm}")
        if self.threshold_factor < 1:
            raise ValidationError(f"threshold_factor must be at least 1, got {self.threshold_factor}")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def split_indices(n_samples: int, config: TrainConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(train, val, test) sample indices, a pure function of (n_samples, seed, fractions)."""
    order = np.random.default_rng(config.seed).permutation(n_samples)
    n_train = int(round(n_samples * config.train_fraction))
    n_val = min(int(round(n_samples * config.val_fraction)), n_samples - n_train)
    return order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:]
