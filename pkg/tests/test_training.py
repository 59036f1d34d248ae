import math
import os
import time

import numpy as np
import pandas as pd
import pytest

from advection import Dataset, SimulationConfig
from conftest import small_config
from errors import NumericAbortError, UsageError, ValidationError
from gncde import InnerMechanism, ModelConfig, OuterMechanism, copy_params, forward, init_params
from metrics import MetricsLog, read_metrics
from training import (
    EpochMetrics,
    ExperimentResult,
    TrainConfig,
    TrainingState,
    checkpoint_load,
    checkpoint_save,
    epochs_to_threshold,
    evaluate,
    get_preset,
    grid_variants,
    mae,
    results_frame,
    results_table,
    run_grid,
    run_variant,
    split_indices,
    summarize,
    train,
)


def quick_config(**overrides) -> TrainConfig:
    values = {"epochs": 2, "batch_size": 8, "lr": 1e-2, "seed": 3}
    values.update(overrides)
    return TrainConfig(**values)


def result(inner, outer, value, seed=0, threshold=None, status="ok") -> ExperimentResult:
    return ExperimentResult(inner, outer, value, 100, threshold, 0.0, seed, status=status)


class TestMAE:
    def test_values(self):
        assert mae(np.zeros((2, 3)), np.zeros((2, 3))) == 0.0
        assert mae(np.ones((2, 3)), np.zeros((2, 3))) == 1.0

    def test_matches_loop(self):
        rng = np.random.default_rng(0)
        pred, target = rng.normal(size=(3, 4, 5)), rng.normal(size=(3, 4, 5))
        total = sum(abs(p - t) for p, t in zip(pred.ravel(), target.ravel()))
        assert mae(pred, target) == pytest.approx(total / pred.size, rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError, match="shape"):
            mae(np.zeros((2, 3)), np.zeros((3, 2)))


class TestSplit:
    def test_sizes_and_cover(self):
        train_idx, val_idx, test_idx = split_indices(100, TrainConfig())
        assert (len(train_idx), len(val_idx), len(test_idx)) == (80, 10, 10)
        assert sorted(np.concatenate([train_idx, val_idx, test_idx]).tolist()) == list(range(100))

    def test_deterministic_per_seed(self):
        a = split_indices(50, TrainConfig(seed=1))
        b = split_indices(50, TrainConfig(seed=1))
        c = split_indices(50, TrainConfig(seed=2))
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        assert not np.array_equal(a[0], c[0])

    def test_fractions_must_sum_to_one(self):
        with pytest.raises(ValidationError, match="sum to 1"):
            TrainConfig(train_fraction=0.5, val_fraction=0.1, test_fraction=0.1)


class TestEvaluate:
    def test_matches_single_forward(self, tiny_dataset):
        config = small_config()
        params = init_params(config, seed=0)
        subset = tiny_dataset.subset(range(3))
        expected = np.mean([
            np.mean(np.abs(forward(config, params, s.input_window).data - s.target_window)) for s in subset
        ])
        assert evaluate(config, params, subset, batch_size=2) == pytest.approx(expected, rel=1e-12)

    def test_repeatable(self, tiny_dataset):
        config = small_config(inner="informed")
        params = init_params(config, seed=0)
        assert evaluate(config, params, tiny_dataset) == evaluate(config, params, tiny_dataset)

    def test_empty_split(self):
        empty = Dataset(np.zeros((0, 25, 4)), np.zeros((0, 24, 4)))
        with pytest.raises(ValidationError, match="empty"):
            evaluate(small_config(), init_params(small_config(), 0), empty)


class TestTrain:
    def test_zero_epochs_leave_params(self, tiny_dataset):
        config = small_config()
        params = init_params(config, seed=0)
        before = copy_params(params)
        outcome = train(config, params, tiny_dataset, quick_config(epochs=0))
        assert outcome.history == []
        for name, array in before.items():
            np.testing.assert_array_equal(params[name].data, array)
            np.testing.assert_array_equal(outcome.params[name].data, array)

    def test_identical_runs(self, tiny_dataset):
        def run():
            config = small_config(outer="informed")
            params = init_params(config, seed=1)
            outcome = train(config, params, tiny_dataset, quick_config())
            return outcome.history, copy_params(params)

        (history_a, params_a), (history_b, params_b) = run(), run()
        assert history_a == history_b
        for name in params_a:
            assert params_a[name].tobytes() == params_b[name].tobytes()

    def test_history_and_best_epoch(self, tiny_dataset):
        config = small_config()
        outcome = train(config, init_params(config, 0), tiny_dataset, quick_config(epochs=3))
        assert [m.epoch for m in outcome.history] == [1, 2, 3]
        assert all(m.val_mae is not None for m in outcome.history)
        best = min(outcome.history, key=lambda m: m.val_mae)
        assert outcome.state.best_epoch == best.epoch
        assert evaluate(config, outcome.params, tiny_dataset.subset(split_indices(20, quick_config())[1])) == (
            pytest.approx(best.val_mae, rel=1e-12)
        )

    def test_metrics_log_records(self, tiny_dataset, tmp_path):
        config = small_config()
        log = MetricsLog(tmp_path / "m.jsonl")
        train(config, init_params(config, 0), tiny_dataset, quick_config(epochs=2), log=log)
        records = read_metrics(tmp_path / "m.jsonl")
        assert [(r["epoch"], r["split"]) for r in records] == [(1, "train"), (1, "val"), (2, "train"), (2, "val")]

    def test_non_finite_loss_aborts(self, tiny_dataset):
        config = small_config()
        params = init_params(config, 0)
        params["readout.bias"].data[:] = np.nan
        with pytest.raises(NumericAbortError, match="epoch=1"):
            train(config, params, tiny_dataset, quick_config())

    @pytest.mark.slow
    def test_overfits_a_single_sample(self, tiny_dataset):
        config = small_config()
        single = tiny_dataset.subset(range(1))
        outcome = train(config, init_params(config, 0), single, quick_config(epochs=200, batch_size=1))
        assert len(outcome.history) == 200
        assert outcome.history[-1].train_mae <= 0.5 * outcome.history[0].train_mae


class TestCheckpoint:
    def test_round_trip_evaluates_identically(self, tiny_dataset, tmp_path):
        config = small_config(inner="agc", outer="informed")
        train_config = quick_config(epochs=1)
        outcome = train(config, init_params(config, 0), tiny_dataset, train_config)
        checkpoint_save(tmp_path / "c.bin", config, train_config, outcome.state)

        state, metadata = checkpoint_load(tmp_path / "c.bin", config)
        assert ModelConfig(**metadata["model_config"]) == config
        assert state.history == outcome.history
        restored = init_params(config, 5)
        for name, array in state.best_params.items():
            restored[name].data[...] = array
        assert evaluate(config, restored, tiny_dataset) == evaluate(config, outcome.params, tiny_dataset)

    def test_resume_matches_uninterrupted(self, tiny_dataset, tmp_path):
        config = small_config()
        full_config = quick_config(epochs=2)
        straight = train(config, init_params(config, 0), tiny_dataset, full_config)

        first = train(config, init_params(config, 0), tiny_dataset, quick_config(epochs=1))
        checkpoint_save(tmp_path / "c.bin", config, full_config, first.state)
        state, _ = checkpoint_load(tmp_path / "c.bin", config)
        resumed = train(config, state.params, tiny_dataset, full_config, state=state)

        assert resumed.history == straight.history
        for name, p in straight.state.params.items():
            assert p.data.tobytes() == resumed.state.params[name].data.tobytes()

    def test_mismatched_config_names_shape(self, tiny_dataset, tmp_path):
        config = small_config()
        state = TrainingState.fresh(init_params(config, 0), quick_config())
        checkpoint_save(tmp_path / "c.bin", config, quick_config(), state)
        with pytest.raises(ValidationError, match="shape"):
            checkpoint_load(tmp_path / "c.bin", small_config(d_h=5))


class TestThreshold:
    def test_first_epoch_below_factor(self):
        history = [EpochMetrics(i + 1, 9.0, v) for i, v in enumerate([1.0, 0.5, 0.34, 0.28])]
        assert epochs_to_threshold(history, 1.25) == 3

    def test_train_mae_without_validation(self):
        history = [EpochMetrics(1, 2.0, None), EpochMetrics(2, 1.0, None)]
        assert epochs_to_threshold(history, 1.5) == 2

    def test_empty(self):
        assert epochs_to_threshold([], 1.25) is None


class TestGridHelpers:
    def test_variants(self):
        assert [(i.value, o.value) for i, o in grid_variants()] == [
            ("identity", "identity"),
            ("informed", "identity"),
            ("identity", "informed"),
            ("agc", "identity"),
            ("agc", "informed"),
        ]
        both = grid_variants(include_informed_both=True)
        assert len(both) == 6 and (both[3][0].value, both[3][1].value) == ("informed", "informed")

    def test_presets(self):
        desk = get_preset("desk")
        assert desk.n_series(4) == 200 and desk.n_series(10) == 500 and desk.n_series(7) == 500
        paper = get_preset("paper")
        assert paper.n_series(4) == 1000 and paper.n_series(10) == 10000
        assert get_preset("full") is paper
        with pytest.raises(UsageError, match="unknown preset"):
            get_preset("huge")

    def test_summarize(self):
        results = [
            result("identity", "identity", 1.0, seed=0, threshold=10),
            result("identity", "informed", 0.8, seed=0, threshold=6),
            result("agc", "identity", 0.5, seed=0, threshold=8),
            result("agc", "informed", 0.5, seed=0, threshold=4),
            result("identity", "identity", 1.0, seed=1),
            result("identity", "informed", 1.2, seed=1),
            result("agc", "informed", math.nan, seed=1, status="aborted"),
        ]
        summary = summarize(results)
        assert summary.n_seeds == 2
        assert summary.outer_informed_wins == 1
        assert summary.agc_informed_wins == 1
        assert summary.median_threshold_informed == 5.0
        assert summary.median_threshold_identity == 9.0
        assert summary.faster_convergence is True
        assert summary.aborted == 1

    @pytest.mark.parametrize(
        "outer_wins, agc_wins, outer_holds, agc_holds",
        [(5, 5, True, True), (4, 3, True, True), (3, 3, False, True), (4, 2, True, False)],
    )
    def test_ordering_needs_a_share_of_seeds(self, outer_wins, agc_wins, outer_holds, agc_holds):
        results = []
        for seed in range(5):
            results += [
                result("identity", "identity", 1.0, seed=seed),
                result("identity", "informed", 0.5 if seed < outer_wins else 1.5, seed=seed),
                result("agc", "identity", 1.0, seed=seed),
                result("agc", "informed", 1.0 if seed < agc_wins else 1.5, seed=seed),
            ]
        summary = summarize(results)
        assert (summary.outer_informed_wins, summary.agc_informed_wins) == (outer_wins, agc_wins)
        assert (summary.outer_informed_required, summary.agc_informed_required) == (4, 3)
        assert summary.outer_informed_holds is outer_holds
        assert summary.agc_informed_holds is agc_holds

    def test_results_table_layout(self):
        results = [
            result("agc", "identity", 0.5),
            result("identity", "identity", 1.0),
            result("identity", "informed", 0.9),
            result("informed", "identity", 0.7),
        ]
        table = results_table(results)
        assert list(table.index) == ["identity", "informed", "agc"]
        assert table.loc["identity", "informed"] == 0.9
        assert pd.isna(table.loc["agc", "informed"])

    def test_empty_frame_has_columns(self):
        assert list(results_frame([]).columns)[:3] == ["inner", "outer", "mae"]


class TestRunGrid:
    def test_writes_results_per_variant(self, g4, tmp_path):
        sim = SimulationConfig(segments_per_edge=12, shift_per_step=2, init_count=6)
        template = ModelConfig(n_vertices=4, d_h=3, d_z=3, hidden_width=4, substeps=1, agc_embed_dim=2)
        seen = []
        results = run_grid(
            g4, sim, template, quick_config(epochs=1), n_series=10, out_dir=tmp_path, on_result=seen.append
        )

        assert len(results) == 5 and seen == results
        assert all(r.status == "ok" and math.isfinite(r.mae) for r in results)
        frame = pd.read_csv(tmp_path / "results.csv")
        assert len(frame) == 5
        assert list(frame.columns[:6]) == ["inner", "outer", "mae", "n_params", "epochs_to_threshold", "seed"]
        assert (tmp_path / "dataset_seed0.bin").exists()
        assert (tmp_path / "checkpoint_agc-informed_seed0.bin").exists()
        counts = {(r.inner, r.outer): r.n_params for r in results}
        assert counts[("identity", "identity")] == counts[("identity", "informed")]
        assert counts[("agc", "identity")] > counts[("identity", "identity")]

    def test_cached_dataset_is_reused(self, g4, tmp_path):
        sim = SimulationConfig(segments_per_edge=12, shift_per_step=2, init_count=6)
        template = ModelConfig(n_vertices=4, d_h=2, d_z=2, hidden_width=3, substeps=1, agc_embed_dim=2)
        first = run_grid(g4, sim, template, quick_config(epochs=0), n_series=10, out_dir=tmp_path)
        stamp = (tmp_path / "dataset_seed0.bin").stat().st_mtime_ns
        second = run_grid(g4, sim, template, quick_config(epochs=0), n_series=10, out_dir=tmp_path)
        assert (tmp_path / "dataset_seed0.bin").stat().st_mtime_ns == stamp
        assert [r.mae for r in first] == [r.mae for r in second]

    @pytest.mark.slow
    def test_desk_trend_on_ten_node_graph(self, g10, tmp_path, record_property):
        """Informed outer coupling wins on the 10-node path across five seeds; takes hours on one core."""
        preset = get_preset("desk")
        template = ModelConfig(n_vertices=10, d_h=preset.d_h, d_z=preset.d_z, hidden_width=preset.hidden_width)
        train_config = TrainConfig(epochs=preset.epochs, batch_size=preset.batch_size, lr=preset.lr)
        started = time.perf_counter()
        results = run_grid(
            g10, SimulationConfig(), template, train_config, preset.n_series(10),
            seeds=range(5), out_dir=tmp_path, workers=os.cpu_count() or 1,
        )
        summary = summarize(results)
        record_property("wall_time_s", round(time.perf_counter() - started))
        record_property("median_epochs_to_threshold_informed", summary.median_threshold_informed)
        record_property("median_epochs_to_threshold_identity", summary.median_threshold_identity)

        assert summary.n_seeds == 5 and summary.aborted == 0
        assert summary.outer_informed_holds, f"{summary.outer_informed_wins}/5 seeds"
        assert summary.agc_informed_holds, f"{summary.agc_informed_wins}/5 seeds"

    def test_abort_is_recorded(self, g4, tiny_dataset, tmp_path, monkeypatch):
        def explode(*args, **kwargs):
            raise NumericAbortError("non-finite training loss", epoch=1, batch=0)

        monkeypatch.setattr("training.grid.train", explode)
        template = ModelConfig(n_vertices=4, d_h=2, d_z=2, hidden_width=3, substeps=1)
        outcome = run_variant(
            g4, tiny_dataset, template, quick_config(), InnerMechanism.IDENTITY, OuterMechanism.INFORMED, tmp_path
        )
        assert outcome.status == "aborted" and math.isnan(outcome.mae)
        records = read_metrics(tmp_path / "metrics_identity-informed_seed3.jsonl")
        assert records[-1]["event"] == "abort" and records[-1]["epoch"] == 1
