from .dataset import (
    HORIZON,
    INPUT_LENGTH,
    Dataset,
    ForecastSample,
    build_dataset,
    dataset_frame,
    export_csv,
    read_dataset,
    write_dataset,
)
from .simulator import (
    EdgeState,
    SimulationConfig,
    VertexSeries,
    advect_step,
    init_edge_state,
    simulate_batch,
    simulate_series,
)

__all__ = [
    "HORIZON",
    "INPUT_LENGTH",
    "Dataset",
    "EdgeState",
    "ForecastSample",
    "SimulationConfig",
    "VertexSeries",
    "advect_step",
    "build_dataset",
    "dataset_frame",
    "export_csv",
    "init_edge_state",
    "read_dataset",
    "simulate_batch",
    "simulate_series",
    "write_dataset",
]
