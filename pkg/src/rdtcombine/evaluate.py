"""Metrics, the cross-validation experiment driver, and rank aggregation.

AUC uses the rank-sum formulation with midrank tie handling; accuracy
thresholds scores at zero and breaks exact zeros toward the training
majority class.  The driver runs the full (dataset x method x leaf size x
repetition x fold) grid, builds a single ensemble per (training fold, leaf
size) that serves every method, and records per-cell failures as skips
instead of aborting.  Ranks are computed per dataset over the joint
(method x leaf size) cells, descending with midrank ties, then averaged
across datasets.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rdtcombine._splitmix import derive, fnv1a64
from rdtcombine.combine import METHODS, CombineContext, scores_all_methods
from rdtcombine.data import make_5x2
from rdtcombine.forest import build_ensemble, route_all

_SALT_PLAN = 0x91A7
_SALT_ENSEMBLE = 0xE45E

RESULT_COLUMNS = ("dataset", "method", "min_leaf", "repetition", "fold", "auc", "accuracy")
REPORT_FORMAT = "rdtcombine-report/1"


@dataclass(frozen=True)
class FoldResult:
    """Metrics of one (dataset, method, leaf size, repetition, fold) cell."""

    dataset: str
    method: str
    min_leaf: int
    repetition: int
    fold: int
    auc: float
    accuracy: float


@dataclass(frozen=True)
class SkipRecord:
    """A grid cell (or group of cells) that could not be evaluated."""

    dataset: str
    repetition: int | None
    fold: int | None
    reason: str


@dataclass(frozen=True)
class EvaluationReport:
    results: tuple[FoldResult, ...]
    skipped: tuple[SkipRecord, ...]
    config: dict
    dataset_stats: tuple[dict, ...]


@dataclass(frozen=True)
class RankTable:
    """Average ranks over the joint (method, leaf size) cells."""

    metric: str
    cells: tuple[tuple[str, int], ...]
    average: np.ndarray
    per_dataset: dict[str, np.ndarray]


def midranks(values) -> np.ndarray:
    """1-based ranks of ``values`` ascending, ties averaged."""
    values = np.asarray(values, dtype=np.float64)
    _, inverse, tie_counts = np.unique(values, return_inverse=True, return_counts=True)
    ends = np.cumsum(tie_counts)
    starts = ends - tie_counts
    mid = (starts + 1 + ends) / 2.0
    return mid[inverse]


def auc(scores, labels) -> float:
    """Area under the ROC curve via rank sums with midrank ties."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have equal length")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC requires both classes in the labels")
    ranks = midranks(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def accuracy(scores, labels, prior_pos: float) -> float:
    """Fraction of correct sign predictions; zeros follow the training majority."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.size == 0:
        raise ValueError("accuracy requires at least one instance")
    tie = 1 if prior_pos >= 0.5 else 0
    preds = np.where(scores > 0, 1, np.where(scores < 0, 0, tie))
    return float((preds == labels).mean())


def _evaluate_fold(args):
    (dataset, assignment, rep, fold, k, leaf_sizes, methods, seed, eva_smoothing, backend) = args
    results: list[FoldResult] = []
    skips: list[SkipRecord] = []
    test_idx = np.flatnonzero(assignment == fold)
    train_idx = np.flatnonzero(assignment != fold)
    y_train = dataset.y[train_idx]
    y_test = dataset.y[test_idx]
    if y_train.min() == y_train.max():
        skips.append(SkipRecord(dataset.name, rep, fold, "training fold has a single class"))
        return results, skips
    if y_test.min() == y_test.max():
        skips.append(SkipRecord(dataset.name, rep, fold, "test fold has a single class"))
        return results, skips
    train = dataset.subset(train_idx)
    X_test = dataset.X[test_idx]
    name_key = fnv1a64(dataset.name)
    for min_leaf in leaf_sizes:
        model = build_ensemble(
            train,
            k=k,
            min_leaf=min_leaf,
            seed=derive(seed, _SALT_ENSEMBLE, name_key, min_leaf, rep, fold),
            backend=backend,
        )
        counts = route_all(model, X_test, backend=backend)
        ctx = CombineContext(prior_pos=model.prior_pos, eva_smoothing=eva_smoothing)
        scores = scores_all_methods(counts, ctx, methods=methods, backend=backend)
        for method in methods:
            results.append(
                FoldResult(
                    dataset=dataset.name,
                    method=method,
                    min_leaf=min_leaf,
                    repetition=rep,
                    fold=fold,
                    auc=auc(scores[method], y_test),
                    accuracy=accuracy(scores[method], y_test, model.prior_pos),
                )
            )
    return results, skips


def _canonical_sort(results: list[FoldResult]) -> tuple[FoldResult, ...]:
    method_order = {m: i for i, m in enumerate(METHODS)}
    return tuple(
        sorted(
            results,
            key=lambda r: (
                r.dataset,
                method_order.get(r.method, len(METHODS)),
                r.min_leaf,
                r.repetition,
                r.fold,
            ),
        )
    )


def run_experiment(
    datasets,
    k: int = 100,
    leaf_sizes=(1, 2, 3, 4, 8, 32),
    methods=METHODS,
    seed: int = 0,
    repetitions: int = 5,
    jobs: int = 1,
    eva_smoothing: float = 0.1,
    backend: str | None = None,
) -> EvaluationReport:
    """Run the full evaluation grid; deterministic for fixed inputs and seed.

    One ensemble per (training fold, leaf size) is built and routed once;
    all methods consume the same leaf counts.  Cells that cannot be
    evaluated (single-class folds) are recorded as skips, never aborting
    the rest of the grid.
    """
    leaf_sizes = tuple(int(s) for s in leaf_sizes)
    if len(set(leaf_sizes)) != len(leaf_sizes) or any(s < 1 for s in leaf_sizes):
        raise ValueError("leaf sizes must be positive and duplicate-free")
    methods = tuple(methods)
    results: list[FoldResult] = []
    skips: list[SkipRecord] = []
    stats = []
    tasks = []
    for ds in datasets:
        stats.append(
            {
                "name": ds.name,
                "instances": ds.n_instances,
                "features": ds.n_features,
                "class_ratio": ds.class_ratio,
            }
        )
        if ds.n_pos < 2 or ds.n_neg < 2:
            skips.append(
                SkipRecord(ds.name, None, None, "dataset lacks 2 instances of each class")
            )
            continue
        plan = make_5x2(ds, derive(seed, _SALT_PLAN, fnv1a64(ds.name)), repetitions)
        for rep in range(repetitions):
            for fold in (0, 1):
                tasks.append(
                    (
                        ds,
                        plan.assignments[rep],
                        rep,
                        fold,
                        k,
                        leaf_sizes,
                        methods,
                        seed,
                        eva_smoothing,
                        backend,
                    )
                )
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_evaluate_fold, tasks))
    else:
        outcomes = [_evaluate_fold(t) for t in tasks]
    for res, skp in outcomes:
        results.extend(res)
        skips.extend(skp)
    config = {
        "trees": k,
        "leaf_sizes": list(leaf_sizes),
        "methods": list(methods),
        "seed": seed,
        "repetitions": repetitions,
        "eva_smoothing": eva_smoothing,
    }
    skips.sort(key=lambda s: (s.dataset, s.repetition is not None, s.repetition or 0, s.fold or 0))
    return EvaluationReport(
        results=_canonical_sort(results),
        skipped=tuple(skips),
        config=config,
        dataset_stats=tuple(stats),
    )


def rank_table(results, metric: str) -> RankTable:
    """Average ranks (1 = best) across datasets over the joint cell grid.

    Every dataset must cover the same (method, leaf size) cells; the cell
    metric is its mean over the available folds.
    """
    if metric not in ("auc", "accuracy"):
        raise ValueError("metric must be 'auc' or 'accuracy'")
    rows = list(results.results) if isinstance(results, EvaluationReport) else list(results)
    if not rows:
        raise ValueError("no results to rank")
    method_order = {m: i for i, m in enumerate(METHODS)}
    cells = sorted(
        {(r.method, r.min_leaf) for r in rows},
        key=lambda c: (method_order.get(c[0], len(METHODS)), c[1]),
    )
    cell_index = {c: i for i, c in enumerate(cells)}
    datasets = sorted({r.dataset for r in rows})
    sums = {d: np.zeros(len(cells)) for d in datasets}
    counts = {d: np.zeros(len(cells), dtype=np.int64) for d in datasets}
    for r in rows:
        i = cell_index[(r.method, r.min_leaf)]
        value = r.auc if metric == "auc" else r.accuracy
        sums[r.dataset][i] += value
        counts[r.dataset][i] += 1
    missing = [
        f"{d}:{m}:{s}"
        for d in datasets
        for (m, s), i in cell_index.items()
        if counts[d][i] == 0
    ]
    if missing:
        raise ValueError(f"ragged results; missing cells: {sorted(missing)}")
    per_dataset = {}
    for d in datasets:
        means = sums[d] / counts[d]
        per_dataset[d] = midranks(-means)  # descending: rank 1 is the best cell
    average = np.mean([per_dataset[d] for d in datasets], axis=0)
    return RankTable(metric=metric, cells=tuple(cells), average=average, per_dataset=per_dataset)


def _config_comment(config: dict) -> str:
    return "# config: " + json.dumps(config, sort_keys=True)


def write_results_csv(report: EvaluationReport, path: str | Path) -> None:
    """Write one row per fold result, with the config echoed in a comment."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(_config_comment(report.config) + "\n")
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for r in report.results:
            writer.writerow(
                [r.dataset, r.method, r.min_leaf, r.repetition, r.fold, repr(r.auc), repr(r.accuracy)]
            )


def read_results_csv(path: str | Path) -> tuple[list[FoldResult], dict]:
    """Read a results file written by :func:`write_results_csv`."""
    rows: list[FoldResult] = []
    config: dict = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        first = fh.readline()
        if first.startswith("# config: "):
            config = json.loads(first[len("# config: ") :])
            reader = csv.reader(fh)
            header = next(reader)
        else:
            reader = csv.reader(fh)
            header = first.strip().split(",")
        if tuple(header) != RESULT_COLUMNS:
            raise ValueError(f"unexpected result columns {header}")
        for row in reader:
            rows.append(
                FoldResult(
                    dataset=row[0],
                    method=row[1],
                    min_leaf=int(row[2]),
                    repetition=int(row[3]),
                    fold=int(row[4]),
                    auc=float(row[5]),
                    accuracy=float(row[6]),
                )
            )
    return rows, config


def rank_to_rows(table: RankTable) -> list[dict]:
    return [
        {"method": m, "min_leaf": s, "avg_rank": float(table.average[i])}
        for i, (m, s) in enumerate(table.cells)
    ]


def write_report_json(report: EvaluationReport, path: str | Path) -> None:
    """Write the aggregate report: config echo, dataset stats, skips, ranks."""
    ranks = {}
    for metric in ("auc", "accuracy"):
        try:
            ranks[metric] = rank_to_rows(rank_table(report, metric))
        except ValueError as exc:
            ranks[metric] = {"error": str(exc)}
    doc = {
        "format": REPORT_FORMAT,
        "config": report.config,
        "datasets": list(report.dataset_stats),
        "skipped": [
            {"dataset": s.dataset, "repetition": s.repetition, "fold": s.fold, "reason": s.reason}
            for s in report.skipped
        ],
        "ranks": ranks,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")
