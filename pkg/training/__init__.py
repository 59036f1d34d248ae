from .config import TrainConfig, split_indices
from .grid import (
    STANDARD_VARIANTS,
    ExperimentResult,
    GridSummary,
    epochs_to_threshold,
    generate_dataset,
    grid_variants,
    results_frame,
    results_table,
    run_grid,
    run_variant,
    summarize,
)
from .presets import PRESET_NAMES, PRESETS, Preset, get_preset
from .trainer import (
    EpochMetrics,
    TrainingState,
    TrainResult,
    checkpoint_load,
    checkpoint_save,
    evaluate,
    mae,
    mae_loss,
    predict,
    train,
)

__all__ = [
    "STANDARD_VARIANTS",
    "PRESET_NAMES",
    "PRESETS",
    "EpochMetrics",
    "ExperimentResult",
    "GridSummary",
    "Preset",
    "TrainConfig",
    "TrainResult",
    "TrainingState",
    "checkpoint_load",
    "checkpoint_save",
    "epochs_to_threshold",
    "evaluate",
    "generate_dataset",
    "get_preset",
    "grid_variants",
    "mae",
    "mae_loss",
    "predict",
    "results_frame",
    "results_table",
    "run_grid",
    "run_variant",
    "split_indices",
    "summarize",
    "train",
]
