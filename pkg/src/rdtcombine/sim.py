"""Leaf-evolution simulator.

Two modes share one sampling scheme: a leaf starts empty and gains one
Bernoulli-distributed class label per step.

* leaf mode: one leaf per trial, scored by a per-leaf scorer after each
  step; shows how each scorer reacts to growing evidence.
* ensemble mode: each trial grows a whole vector of independent leaves and
  applies a full combination method to it after each step.

Summaries per step are the mean over trials plus empirical nearest-rank
quantiles.  Trials draw from seeds derived per (trial) or (trial, leaf), so
results are independent of execution order.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from rdtcombine._splitmix import derive, uniforms
from rdtcombine.combine import METHODS, CombineContext, scores_all_methods
from rdtcombine.scoring import SCORERS, score_table

_SALT_LEAF_MODE = 0x51F1
_SALT_ENSEMBLE_MODE = 0x51F2

DEFAULT_QUANTILES = (0.10, 0.25, 0.75, 0.90)


@dataclass(frozen=True)
class SimConfig:
    """Parameters of the growth simulation."""

    p_pos: float = 0.75
    max_n: int = 100
    trials: int = 100
    ensemble_leaves: int = 100
    seed: int = 0
    quantiles: tuple[float, ...] = DEFAULT_QUANTILES

    def __post_init__(self):
        if not 0.0 < self.p_pos < 1.0:
            raise ValueError(f"p_pos must lie strictly in (0, 1), got {self.p_pos}")
        for name in ("max_n", "trials", "ensemble_leaves"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.quantiles:
            raise ValueError("at least one quantile is required")
        labels = set()
        for q in self.quantiles:
            if not 0.0 < q <= 1.0:
                raise ValueError(f"quantiles must lie in (0, 1], got {q}")
            labels.add(quantile_label(q))
        if len(labels) != len(self.quantiles):
            raise ValueError("quantiles map to duplicate column labels")


@dataclass(frozen=True)
class TrajectorySummary:
    """Per-step summary of one simulated method."""

    method: str
    mode: str  # "leaf" | "ensemble"
    steps: np.ndarray  # (max_n,) 1-based step index
    mean: np.ndarray  # (max_n,)
    quantiles: dict[float, np.ndarray] = field(default_factory=dict)


def quantile_label(q: float) -> str:
    """Column label of a quantile, e.g. 0.25 -> 'q25'."""
    return f"q{round(q * 100):d}"


def _nearest_rank(sorted_scores: np.ndarray, q: float) -> np.ndarray:
    """Nearest-rank quantile along axis 0 of already sorted scores."""
    t = sorted_scores.shape[0]
    rank = int(np.ceil(q * t))
    return sorted_scores[max(rank, 1) - 1]


def _summarize(method: str, mode: str, scores: np.ndarray, cfg: SimConfig) -> TrajectorySummary:
    """Summarize a (trials, max_n) score matrix per step."""
    ordered = np.sort(scores, axis=0)
    return TrajectorySummary(
        method=method,
        mode=mode,
        steps=np.arange(1, cfg.max_n + 1, dtype=np.int64),
        mean=scores.mean(axis=0),
        quantiles={q: _nearest_rank(ordered, q) for q in cfg.quantiles},
    )


def _grow_counts(cfg: SimConfig, salt: int, streams: int) -> np.ndarray:
    """Cumulative positive counts: (streams, max_n) after 1..max_n samples."""
    pos = np.empty((streams, cfg.max_n), dtype=np.int64)
    for s in range(streams):
        draws = uniforms(derive(cfg.seed, salt, s), cfg.max_n) < cfg.p_pos
        pos[s] = np.cumsum(draws)
    return pos


def simulate_scorer(cfg: SimConfig, scorer: str) -> TrajectorySummary:
    """Grow one leaf per trial and score it after every step."""
    if scorer not in SCORERS:
        raise ValueError(f"unknown scorer {scorer!r}; expected one of {SCORERS}")
    pos = _grow_counts(cfg, _SALT_LEAF_MODE, cfg.trials)
    n = np.arange(1, cfg.max_n + 1, dtype=np.int64)[None, :]
    scores = score_table(scorer, pos, n - pos)
    return _summarize(scorer, "leaf", scores, cfg)


def simulate_combiner(
    cfg: SimConfig, method: str, backend: str | None = None
) -> TrajectorySummary:
    """Grow a leaf vector per trial and combine it after every step."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    k = cfg.ensemble_leaves
    pos = np.empty((cfg.trials, k, cfg.max_n), dtype=np.int64)
    for t in range(cfg.trials):
        for leaf in range(k):
            draws = uniforms(derive(cfg.seed, _SALT_ENSEMBLE_MODE, t, leaf), cfg.max_n)
            pos[t, leaf] = np.cumsum(draws < cfg.p_pos)
    ctx = CombineContext(prior_pos=cfg.p_pos)
    scores = np.empty((cfg.trials, cfg.max_n), dtype=np.float64)
    counts = np.empty((cfg.trials, k, 2), dtype=np.int64)
    for step in range(1, cfg.max_n + 1):
        counts[:, :, 0] = pos[:, :, step - 1]
        counts[:, :, 1] = step - pos[:, :, step - 1]
        scores[:, step - 1] = scores_all_methods(
            counts, ctx, methods=(method,), backend=backend
        )[method]
    return _summarize(method, "ensemble", scores, cfg)


def sim_columns(cfg: SimConfig) -> list[str]:
    return ["step", "method", "mean"] + [quantile_label(q) for q in cfg.quantiles]


def write_sim_csv(summary: TrajectorySummary, cfg: SimConfig, path: str | Path) -> None:
    """Write one row per step with the config echoed in a comment line."""
    echo = {
        "p_pos": cfg.p_pos,
        "max_n": cfg.max_n,
        "trials": cfg.trials,
        "ensemble_leaves": cfg.ensemble_leaves,
        "seed": cfg.seed,
        "quantiles": list(cfg.quantiles),
        "mode": summary.mode,
    }
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write("# config: " + json.dumps(echo, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(sim_columns(cfg))
        for i, step in enumerate(summary.steps):
            row = [int(step), summary.method, repr(float(summary.mean[i]))]
            row += [repr(float(summary.quantiles[q][i])) for q in cfg.quantiles]
            writer.writerow(row)
