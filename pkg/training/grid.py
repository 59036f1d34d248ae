"""
The informedness grid: every (inner, outer) mechanism pair trained on the same
dataset from the same initial seed, summarised in the layout of the results table
(rows: inner mechanism, columns: outer mechanism).
"""

from __future__ import annotations

import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import pandas as pd

from advection import Dataset, SimulationConfig, build_dataset, read_dataset, simulate_batch, write_dataset
from errors import NumericAbortError
from gncde import InnerMechanism, ModelConfig, OuterMechanism, count_params, init_params
from metrics import MetricsLog
from topology import Graph
from .config import TrainConfig, split_indices
from .trainer import EpochMetrics, checkpoint_save, evaluate, train

logger = logging.getLogger(__name__)

I, F, A = InnerMechanism.IDENTITY, InnerMechanism.INFORMED, InnerMechanism.AGC
STANDARD_VARIANTS: tuple[tuple[InnerMechanism, OuterMechanism], ...] = (
    (I, OuterMechanism.IDENTITY),
    (F, OuterMechanism.IDENTITY),
    (I, OuterMechanism.INFORMED),
    (A, OuterMechanism.IDENTITY),
    (A, OuterMechanism.INFORMED),
)
INFORMED_BOTH = (F, OuterMechanism.INFORMED)

RESULT_COLUMNS = ["inner", "outer", "mae", "n_params", "epochs_to_threshold", "seed"]

# Share of seeds on which each ordering must hold.
OUTER_INFORMED_SHARE = Fraction(4, 5)
AGC_INFORMED_SHARE = Fraction(3, 5)


@dataclass(frozen=True)
class ExperimentResult:
    inner: str
    outer: str
    mae: float
    n_params: int
    epochs_to_threshold: int | None
    wall_time: float
    seed: int
    best_epoch: int = 0
    status: str = "ok"


def epochs_to_threshold(history: Sequence[EpochMetrics], factor: float) -> int | None:
    """First epoch whose validation MAE is below factor x the best validation MAE."""
    scores = [(m.epoch, m.val_mae if m.val_mae is not None else m.train_mae) for m in history]
    if not scores:
        return None
    best = min(score for _, score in scores)
    for epoch, score in scores:
        if score < factor * best:
            return epoch
    return None


def grid_variants(include_informed_both: bool = False) -> list[tuple[InnerMechanism, OuterMechanism]]:
    variants = list(STANDARD_VARIANTS)
    if include_informed_both:
        variants.insert(3, INFORMED_BOTH)
    return variants


def generate_dataset(graph: Graph, sim_config: SimulationConfig, n_series: int, workers: int = 1) -> Dataset:
    series = simulate_batch(graph, sim_config, n_series, workers=workers)
    metadata = {
        "graph": graph.to_dict(),
        "simulation": sim_config.to_dict(),
        "seed": sim_config.seed,
        "n_series": n_series,
    }
    return build_dataset(series, metadata=metadata)


def run_variant(
    graph: Graph,
    dataset: Dataset,
    template: ModelConfig,
    train_config: TrainConfig,
    inner: InnerMechanism,
    outer: OuterMechanism,
    out_dir: Path | None = None,
) -> ExperimentResult:
    """Train and test one mechanism pair."""
    config = template.with_mechanisms(inner, outer, graph.adjacency)
    label = f"{inner.value}-{outer.value}"
    log = MetricsLog(out_dir / f"metrics_{label}_seed{train_config.seed}.jsonl", run=label) if out_dir else None
    started = time.perf_counter()
    params = init_params(config, seed=train_config.seed)
    n_params = count_params(config)

    try:
        result = train(config, params, dataset, train_config, log=log)
    except NumericAbortError as e:
        logger.error("variant %s aborted: %s", label, e)
        if log is not None:
            log.write_abort(str(e), e.context)
        return ExperimentResult(
            inner.value, outer.value, math.nan, n_params, None,
            time.perf_counter() - started, train_config.seed, status="aborted",
        )

    _, _, test_idx = split_indices(len(dataset), train_config)
    test_set = dataset.subset(test_idx) if len(test_idx) else dataset.subset(range(len(dataset)))
    test_mae = evaluate(config, result.params, test_set, train_config.batch_size)
    if out_dir is not None:
        checkpoint_save(out_dir / f"checkpoint_{label}_seed{train_config.seed}.bin", config, train_config, result.state)

    outcome = ExperimentResult(
        inner=inner.value,
        outer=outer.value,
        mae=test_mae,
        n_params=n_params,
        epochs_to_threshold=epochs_to_threshold(result.history, train_config.threshold_factor),
        wall_time=time.perf_counter() - started,
        seed=train_config.seed,
        best_epoch=result.state.best_epoch,
    )
    if log is not None:
        log.write_variant(asdict(outcome))
    return outcome


def _run_variant_task(args) -> ExperimentResult:
    return run_variant(*args)


def run_grid(
    graph: Graph,
    sim_config: SimulationConfig,
    template: ModelConfig,
    train_config: TrainConfig,
    n_series: int,
    seeds: Sequence[int] = (0,),
    out_dir: str | Path | None = None,
    include_informed_both: bool = False,
    workers: int = 1,
    on_result=None,
) -> list[ExperimentResult]:
    """
    Train every variant for every seed.

    Each seed gets its own dataset (simulation seed = seed) and initial parameters.
    With out_dir, datasets are cached there and results.csv is rewritten after every
    variant, so partial results survive an interruption.
    """
    out_dir = Path(out_dir) if out_dir is not None else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    results: list[ExperimentResult] = []

    for seed in seeds:
        seeded_sim = replace(sim_config, seed=seed)
        seeded_train = replace(train_config, seed=seed)
        cache = out_dir / f"dataset_seed{seed}.bin" if out_dir is not None else None
        if cache is not None and cache.exists():
            dataset = read_dataset(cache)
        else:
            dataset = generate_dataset(graph, seeded_sim, n_series, workers=workers)
            if cache is not None:
                write_dataset(dataset, cache)

        tasks = [
            (graph, dataset, template, seeded_train, inner, outer, out_dir)
            for inner, outer in grid_variants(include_informed_both)
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                seed_results = pool.map(_run_variant_task, tasks)
                for outcome in seed_results:
                    results.append(outcome)
                    _persist(results, out_dir, on_result, outcome)
        else:
            for task in tasks:
                outcome = _run_variant_task(task)
                results.append(outcome)
                _persist(results, out_dir, on_result, outcome)
    return results


def _persist(results: list[ExperimentResult], out_dir: Path | None, on_result, outcome: ExperimentResult) -> None:
    logger.info("%s x %s (seed %d): MAE %.4f, %d params", outcome.inner, outcome.outer, outcome.seed,
                outcome.mae, outcome.n_params)
    if out_dir is not None:
        results_frame(results).to_csv(out_dir / "results.csv", index=False)
    if on_result is not None:
        on_result(outcome)


def results_frame(results: Sequence[ExperimentResult]) -> pd.DataFrame:
    frame = pd.DataFrame([asdict(r) for r in results])
    if frame.empty:
        return pd.DataFrame(columns=RESULT_COLUMNS)
    extra = [c for c in frame.columns if c not in RESULT_COLUMNS]
    return frame[RESULT_COLUMNS + extra]


def results_table(results: Sequence[ExperimentResult]) -> pd.DataFrame:
    """Median test MAE per (inner, outer) pair pivoted like the results table, with parameter counts."""
    frame = results_frame(results)
    table = frame.pivot_table(index="inner", columns="outer", values="mae", aggfunc="median")
    table["n_params"] = frame.groupby("inner")["n_params"].first()
    order = [m.value for m in InnerMechanism if m.value in table.index]
    return table.loc[order]


@dataclass(frozen=True)
class GridSummary:
    n_seeds: int
    outer_informed_wins: int  # seeds with MAE(identity, informed) < MAE(identity, identity)
    agc_informed_wins: int  # seeds with MAE(agc, informed) <= MAE(agc, identity)
    median_threshold_informed: float | None
    median_threshold_identity: float | None
    aborted: int

    @property
    def outer_informed_required(self) -> int:
        return math.ceil(OUTER_INFORMED_SHARE * self.n_seeds)

    @property
    def agc_informed_required(self) -> int:
        return math.ceil(AGC_INFORMED_SHARE * self.n_seeds)

    @property
    def outer_informed_holds(self) -> bool:
        return self.n_seeds > 0 and self.outer_informed_wins >= self.outer_informed_required

    @property
    def agc_informed_holds(self) -> bool:
        return self.n_seeds > 0 and self.agc_informed_wins >= self.agc_informed_required

    @property
    def faster_convergence(self) -> bool | None:
        if self.median_threshold_informed is None or self.median_threshold_identity is None:
            return None
        return self.median_threshold_informed <= self.median_threshold_identity


def summarize(results: Sequence[ExperimentResult]) -> GridSummary:
    by_seed: dict[int, dict[tuple[str, str], ExperimentResult]] = {}
    for r in results:
        by_seed.setdefault(r.seed, {})[(r.inner, r.outer)] = r

    def wins(pair_a, pair_b, strict: bool) -> int:
        count = 0
        for cells in by_seed.values():
            if pair_a in cells and pair_b in cells:
                a, b = cells[pair_a].mae, cells[pair_b].mae
                if (a < b) if strict else (a <= b):
                    count += 1
        return count

    def median_threshold(outer: str) -> float | None:
        values = [r.epochs_to_threshold for r in results if r.outer == outer and r.epochs_to_threshold is not None]
        return float(statistics.median(values)) if values else None

    return GridSummary(
        n_seeds=len(by_seed),
        outer_informed_wins=wins(("identity", "informed"), ("identity", "identity"), strict=True),
        agc_informed_wins=wins(("agc", "informed"), ("agc", "identity"), strict=False),
        median_threshold_informed=median_threshold("informed"),
        median_threshold_identity=median_threshold("identity"),
        aborted=sum(r.status != "ok" for r in results),
    )
