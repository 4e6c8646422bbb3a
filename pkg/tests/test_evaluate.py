import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdtcombine.combine import METHODS
from rdtcombine.evaluate import (
    FoldResult,
    accuracy,
    auc,
    midranks,
    rank_table,
    read_results_csv,
    run_experiment,
    write_results_csv,
)


def pair_counting_auc(scores, labels) -> float:
    """O(n^2) oracle: wins + half-ties over all positive/negative pairs."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return float((wins + 0.5 * ties) / (len(pos) * len(neg)))


class TestAuc:
    def test_perfect_separation(self):
        assert auc([0.9, 0.1], [1, 0]) == 1.0

    def test_all_ties_half(self):
        assert auc([0.3, 0.3, 0.3, 0.3], [1, 0, 1, 0]) == 0.5

    def test_worked_example_with_tie(self):
        assert auc([0.3, 0.2, 0.2, 0.1], [1, 0, 1, 0]) == 0.875

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            auc([0.1, 0.2], [1, 1])

    def test_matches_pair_counting_oracle_1000_runs(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            n = int(rng.integers(2, 201))
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            # round to force plenty of exact ties
            scores = np.round(rng.normal(size=n), 1)
            assert auc(scores, labels) == pair_counting_auc(scores, labels)

    @given(
        st.lists(st.integers(0, 1), min_size=2, max_size=40).filter(
            lambda ls: 0 < sum(ls) < len(ls)
        ),
        st.integers(0, 2**32 - 1),
    )
    @settings(deadline=None, max_examples=50)
    def test_invariant_under_monotone_transforms(self, labels, seed):
        rng = np.random.default_rng(seed)
        scores = np.round(rng.normal(size=len(labels)), 1)
        base = auc(scores, labels)
        assert auc(3.0 * scores + 1.0, labels) == pytest.approx(base, abs=1e-12)
        assert auc(np.exp(scores), labels) == pytest.approx(base, abs=1e-12)
        assert auc(np.sign(scores) * np.abs(scores) ** 3, labels) == pytest.approx(
            base, abs=1e-12
        )


class TestAccuracy:
    def test_simple_cases(self):
        assert accuracy([0.2, -0.1], [1, 0], prior_pos=0.5) == 1.0
        assert accuracy([0.2, -0.1], [0, 1], prior_pos=0.5) == 0.0

    def test_zero_scores_follow_majority(self):
        labels = [1] * 7 + [0] * 3
        assert accuracy([0.0] * 10, labels, prior_pos=0.7) == 0.7
        assert accuracy([0.0] * 10, labels, prior_pos=0.3) == 0.3

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            accuracy([], [], prior_pos=0.5)

    def test_vote_affine_equivalence_on_tie_free_scores(self):
        # the +-1 vote mean is an affine transform of the 0/1 indicator mean
        # whenever no per-tree score is exactly zero
        rng = np.random.default_rng(3)
        for _ in range(200):
            k, n = int(rng.integers(1, 12)), int(rng.integers(1, 30))
            tree_scores = rng.normal(size=(n, k))
            tree_scores[tree_scores == 0.0] = 0.5
            labels = rng.integers(0, 2, size=n)
            plus_minus = np.sign(tree_scores).mean(axis=1)
            indicator = (tree_scores > 0).mean(axis=1)
            assert accuracy(plus_minus, labels, 0.6) == accuracy(
                2.0 * indicator - 1.0, labels, 0.6
            )


class TestMidranks:
    def test_plain_and_tied(self):
        assert midranks([10.0, 30.0, 20.0]).tolist() == [1.0, 3.0, 2.0]
        assert midranks([1.0, 1.0]).tolist() == [1.5, 1.5]
        assert midranks([2.0, 1.0, 1.0, 0.0]).tolist() == [4.0, 2.5, 2.5, 1.0]


def make_rows(spec):
    """spec: {dataset: {(method, leaf): [auc values]}} with accuracy = auc."""
    rows = []
    for dataset, cells in spec.items():
        for (method, leaf), values in cells.items():
            for i, v in enumerate(values):
                rows.append(
                    FoldResult(
                        dataset=dataset,
                        method=method,
                        min_leaf=leaf,
                        repetition=i // 2,
                        fold=i % 2,
                        auc=v,
                        accuracy=v,
                    )
                )
    return rows


class TestRankTable:
    def test_two_cells_ranked(self):
        rows = make_rows({"d": {("prob", 1): [0.9], ("vote", 1): [0.8]}})
        table = rank_table(rows, "auc")
        assert table.cells == (("prob", 1), ("vote", 1))
        assert table.average.tolist() == [1.0, 2.0]

    def test_tied_cells_get_midrank(self):
        rows = make_rows({"d": {("prob", 1): [0.8], ("vote", 1): [0.8]}})
        table = rank_table(rows, "auc")
        assert table.average.tolist() == [1.5, 1.5]

    def test_opposite_orderings_average_out(self):
        rows = make_rows(
            {
                "d1": {("prob", 1): [0.9], ("vote", 1): [0.8]},
                "d2": {("prob", 1): [0.7], ("vote", 1): [0.8]},
            }
        )
        table = rank_table(rows, "auc")
        assert table.average.tolist() == [1.5, 1.5]

    def test_ragged_grid_rejected_naming_cells(self):
        rows = make_rows(
            {
                "d1": {("prob", 1): [0.9], ("vote", 1): [0.8]},
                "d2": {("prob", 1): [0.7]},
            }
        )
        with pytest.raises(ValueError, match="d2:vote:1"):
            rank_table(rows, "auc")

    def test_rank_sum_is_permutation_sum(self):
        rng = np.random.default_rng(5)
        cells = {(m, s): [float(rng.uniform(0.5, 1.0))] for m in METHODS for s in (1, 4)}
        rows = make_rows({"d": cells})
        table = rank_table(rows, "accuracy")
        m = len(table.cells)
        assert table.average.sum() == pytest.approx(m * (m + 1) / 2)

    def test_metric_validated(self):
        with pytest.raises(ValueError):
            rank_table([], "f1")


class TestRunExperiment:
    def test_cell_counting_small_grid(self, numeric_dataset):
        report = run_experiment(
            [numeric_dataset], k=5, leaf_sizes=(1,), methods=("prob",), seed=3
        )
        assert len(report.results) == 10  # 5 repetitions x 2 folds
        assert not report.skipped
        assert report.config["trees"] == 5

    def test_full_method_grid_arity(self, numeric_dataset):
        report = run_experiment(
            [numeric_dataset], k=3, leaf_sizes=(1, 4), methods=METHODS, seed=3
        )
        assert len(report.results) == len(METHODS) * 2 * 10

    def test_determinism(self, numeric_dataset, mixed_dataset):
        kwargs = dict(k=4, leaf_sizes=(1, 2), methods=("prob", "eva"), seed=9)
        a = run_experiment([numeric_dataset, mixed_dataset], **kwargs)
        b = run_experiment([numeric_dataset, mixed_dataset], **kwargs)
        assert a == b

    def test_jobs_do_not_change_results(self, numeric_dataset):
        kwargs = dict(k=3, leaf_sizes=(1,), methods=("prob", "dempster"), seed=2)
        serial = run_experiment([numeric_dataset], jobs=1, **kwargs)
        parallel = run_experiment([numeric_dataset], jobs=3, **kwargs)
        assert serial.results == parallel.results

    def test_single_class_dataset_skipped(self, dataset_factory, numeric_dataset):
        lone = dataset_factory([[0.0], [1.0], [2.0]], [1, 1, 1], name="one-sided")
        report = run_experiment(
            [lone, numeric_dataset], k=2, leaf_sizes=(1,), methods=("prob",), seed=1
        )
        assert any(s.dataset == "one-sided" for s in report.skipped)
        assert all(r.dataset != "one-sided" for r in report.results)
        assert len(report.results) == 10

    def test_duplicate_leaf_sizes_rejected(self, numeric_dataset):
        with pytest.raises(ValueError):
            run_experiment([numeric_dataset], leaf_sizes=(1, 1))

    def test_metric_ranges(self, mixed_dataset):
        report = run_experiment(
            [mixed_dataset], k=4, leaf_sizes=(1, 3), methods=METHODS, seed=8
        )
        for r in report.results:
            assert 0.0 <= r.auc <= 1.0
            assert 0.0 <= r.accuracy <= 1.0


class TestCsvRoundTrip:
    def test_write_read_round_trip(self, numeric_dataset, tmp_path):
        report = run_experiment(
            [numeric_dataset], k=2, leaf_sizes=(1,), methods=("prob", "vote"), seed=5
        )
        path = tmp_path / "results.csv"
        write_results_csv(report, path)
        rows, config = read_results_csv(path)
        assert rows == list(report.results)
        assert config == report.config

    def test_rerun_is_byte_identical(self, numeric_dataset, tmp_path):
        kwargs = dict(k=2, leaf_sizes=(1, 2), methods=("prob", "cautious"), seed=5)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_results_csv(run_experiment([numeric_dataset], **kwargs), a)
        write_results_csv(run_experiment([numeric_dataset], **kwargs), b)
        assert a.read_bytes() == b.read_bytes()
