import numpy as np
import pytest

from rdtcombine.combine import METHODS
from rdtcombine.scoring import SCORERS
from rdtcombine.sim import (
    SimConfig,
    quantile_label,
    sim_columns,
    simulate_combiner,
    simulate_scorer,
    write_sim_csv,
)

FAST = SimConfig(max_n=30, trials=40, ensemble_leaves=10, seed=5)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimConfig(p_pos=1.2)
        with pytest.raises(ValueError):
            SimConfig(p_pos=0.0)
        with pytest.raises(ValueError):
            SimConfig(max_n=0)
        with pytest.raises(ValueError):
            SimConfig(quantiles=())
        with pytest.raises(ValueError):
            SimConfig(quantiles=(0.1, 1.5))
        with pytest.raises(ValueError):
            SimConfig(quantiles=(0.101, 0.1049))  # same q10 label

    def test_quantile_labels(self):
        assert quantile_label(0.1) == "q10"
        assert quantile_label(0.25) == "q25"
        assert quantile_label(0.5) == "q50"
        assert quantile_label(0.9) == "q90"


class TestScorerMode:
    def test_shapes_and_steps(self):
        summary = simulate_scorer(FAST, "prob")
        assert summary.steps.tolist() == list(range(1, FAST.max_n + 1))
        assert summary.mean.shape == (FAST.max_n,)
        assert set(summary.quantiles) == set(FAST.quantiles)

    def test_deterministic(self):
        a = simulate_scorer(FAST, "laplace")
        b = simulate_scorer(FAST, "laplace")
        assert np.array_equal(a.mean, b.mean)
        for q in FAST.quantiles:
            assert np.array_equal(a.quantiles[q], b.quantiles[q])

    def test_quantiles_ordered(self):
        for scorer in SCORERS:
            summary = simulate_scorer(FAST, scorer)
            qs = sorted(FAST.quantiles)
            for lo, hi in zip(qs, qs[1:]):
                assert np.all(summary.quantiles[lo] <= summary.quantiles[hi] + 1e-15)

    def test_symmetric_chance_level(self):
        cfg = SimConfig(p_pos=0.5, max_n=60, trials=200, seed=17)
        for scorer in ("prob", "laplace"):
            summary = simulate_scorer(cfg, scorer)
            # mean stays within 3 standard errors of zero at every step
            assert np.all(np.abs(summary.mean) < 3 * 0.5 / np.sqrt(cfg.trials) + 0.02)

    def test_scores_respect_ranges(self):
        for scorer, bound in (("prob", 0.5), ("laplace", 0.5), ("cb", 0.5), ("pls", 1.0)):
            summary = simulate_scorer(FAST, scorer)
            assert np.all(np.abs(summary.mean) <= bound + 1e-12)

    def test_unknown_scorer_rejected(self):
        with pytest.raises(ValueError):
            simulate_scorer(FAST, "pool")


class TestCombinerMode:
    def test_all_methods_run(self):
        for method in METHODS:
            summary = simulate_combiner(FAST, method)
            assert summary.mode == "ensemble"
            assert summary.mean.shape == (FAST.max_n,)

    def test_deterministic(self):
        a = simulate_combiner(FAST, "pool")
        b = simulate_combiner(FAST, "pool")
        assert np.array_equal(a.mean, b.mean)

    def test_pool_converges_to_true_score(self):
        cfg = SimConfig(p_pos=0.75, max_n=80, trials=30, ensemble_leaves=20, seed=2)
        summary = simulate_combiner(cfg, "pool")
        # pooled counts at n=80 x 20 leaves: very tight around 0.25
        assert summary.mean[-1] == pytest.approx(0.25, abs=0.02)

    def test_averaging_tightens_dispersion_vs_single_leaf(self):
        cfg = SimConfig(p_pos=0.75, max_n=40, trials=60, ensemble_leaves=30, seed=3)
        single = simulate_scorer(cfg, "prob")
        combined = simulate_combiner(cfg, "prob")
        band_single = single.quantiles[0.9][-1] - single.quantiles[0.1][-1]
        band_combined = combined.quantiles[0.9][-1] - combined.quantiles[0.1][-1]
        assert band_combined < band_single + 1e-12

    def test_eva_commitment_shrinks_with_leaf_size(self):
        cfg = SimConfig(p_pos=0.75, max_n=32, trials=40, ensemble_leaves=25, seed=4)
        summary = simulate_combiner(cfg, "eva")
        assert np.abs(summary.mean[31]) < np.abs(summary.mean[3])


class TestCsv:
    def test_columns_and_round_trip(self, tmp_path):
        cfg = SimConfig(max_n=10, trials=8, ensemble_leaves=4, seed=1)
        summary = simulate_combiner(cfg, "vote")
        path = tmp_path / "sim_vote.csv"
        write_sim_csv(summary, cfg, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# config: ")
        assert lines[1].split(",") == sim_columns(cfg)
        assert len(lines) == 2 + cfg.max_n
        step, method, mean = lines[2].split(",")[:3]
        assert step == "1" and method == "vote"
        assert float(mean) == summary.mean[0]

    def test_median_only_override(self, tmp_path):
        cfg = SimConfig(max_n=5, trials=8, ensemble_leaves=4, seed=1, quantiles=(0.5,))
        summary = simulate_scorer(cfg, "prob")
        path = tmp_path / "sim_prob.csv"
        write_sim_csv(summary, cfg, path)
        header = path.read_text().splitlines()[1]
        assert header == "step,method,mean,q50"
