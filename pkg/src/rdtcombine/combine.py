"""Unified combination strategies over the per-tree leaf counts.

Nine methods share one input: the vector of leaf statistics collected by
routing an instance through the ensemble.

* ``prob``, ``laplace``, ``pls``, ``cb`` score each leaf and average.
* ``vote`` averages per-leaf sign votes (zero scores abstain).
* ``pool`` sums the counts first, then computes one centered frequency.
* ``dempster`` / ``cautious`` fold per-leaf mass functions with the
  respective belief combination rule and score the folded mass.
* ``eva`` multiplies per-leaf likelihood ratios onto the class priors
  (accumulated in log space) and returns the normalized difference
  ``(A - B) / (A + B)``, which never materializes the raw products and
  preserves the sign of ``log A - log B``.

The scalar functions operate on one leaf vector; :func:`combine_batch` and
:func:`scores_all_methods` run vectorized over a whole test set, sharing
per-unique-leaf lookup tables and dispatching folds to the active backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from rdtcombine import backend as _backend
from rdtcombine import belief, scoring
from rdtcombine.forest import LeafStats

#: stable method identifiers, in reporting order
METHODS = ("prob", "laplace", "pls", "cb", "vote", "pool", "dempster", "cautious", "eva")

_SCORER_FOR = {"prob": "prob", "laplace": "laplace", "pls": "pls", "cb": "cb"}


@dataclass(frozen=True)
class CombineContext:
    """Training-data context needed by the evidence-accumulation method."""

    prior_pos: float
    eva_smoothing: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.prior_pos < 1.0:
            raise ValueError("prior_pos must lie strictly between 0 and 1")
        if self.eva_smoothing <= 0.0:
            raise ValueError("eva_smoothing must be positive")


def _as_matrix(leaves) -> np.ndarray:
    if isinstance(leaves, np.ndarray):
        mat = np.asarray(leaves, dtype=np.int64)
    else:
        mat = np.array(
            [(l.pos, l.neg) if isinstance(l, LeafStats) else tuple(l) for l in leaves],
            dtype=np.int64,
        ).reshape(-1, 2)
    if mat.ndim != 2 or mat.shape[1] != 2 or mat.shape[0] < 1:
        raise ValueError("expected a (K, 2) leaf-count vector with K >= 1")
    if mat.min() < 0:
        raise ValueError("leaf counts must be nonnegative")
    return mat


def pool(leaves) -> float:
    """Sum the leaf statistics, then compute one centered frequency."""
    mat = _as_matrix(leaves)
    total = mat.sum()
    if total < 1:
        raise ValueError("pool requires at least one observation overall")
    return float(mat[:, 0].sum() / total - 0.5)


def eva(leaves, ctx: CombineContext) -> float:
    """Accumulate per-leaf evidence multiplicatively onto the class priors."""
    mat = _as_matrix(leaves)
    n = mat.sum(axis=1)
    if n.min() < 1:
        raise ValueError("eva requires every leaf to hold an observation")
    s = ctx.eva_smoothing
    log_a = math.log(ctx.prior_pos)
    log_b = math.log(1.0 - ctx.prior_pos)
    for pos_i, n_i in zip(mat[:, 0], n):
        log_a += math.log((pos_i + s) / (n_i + 2.0 * s)) - math.log(ctx.prior_pos)
        log_b += math.log((n_i - pos_i + s) / (n_i + 2.0 * s)) - math.log(
            1.0 - ctx.prior_pos
        )
    peak = max(log_a, log_b)
    a = math.exp(log_a - peak)
    b = math.exp(log_b - peak)
    return (a - b) / (a + b)


def combine(method: str, leaves, ctx: CombineContext | None = None) -> float:
    """Apply one combination method to a single leaf vector."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    mat = _as_matrix(leaves)
    if method in _SCORER_FOR:
        scorer = {
            "prob": scoring.score_prob,
            "laplace": scoring.score_laplace,
            "pls": scoring.score_plausibility,
            "cb": scoring.score_cb,
        }[method]
        return scoring.aggregate_avg([scorer(tuple(row)) for row in mat])
    if method == "vote":
        return scoring.aggregate_vote([scoring.score_prob(tuple(row)) for row in mat])
    if method == "pool":
        return pool(mat)
    if method == "eva":
        if ctx is None:
            raise ValueError("eva requires a CombineContext")
        return eva(mat, ctx)
    masses = [belief.mass_from_leaf(tuple(row)) for row in mat]
    if method == "dempster":
        return belief.mass_to_score(reduce(belief.dempster_pair, masses))
    folded = reduce(belief.cautious_pair, [belief.weights_of(m) for m in masses])
    return belief.mass_to_score(belief.mass_of(folded))


def _unique_pairs(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    flat = counts.reshape(-1, 2)
    pairs, inverse = np.unique(flat, axis=0, return_inverse=True)
    return pairs, inverse.reshape(counts.shape[:2])


def _check_counts(counts: np.ndarray) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.int64)
    if counts.ndim != 3 or counts.shape[2] != 2 or counts.shape[1] < 1:
        raise ValueError("expected an (N, K, 2) leaf-count array")
    if counts.size and counts.min() < 0:
        raise ValueError("leaf counts must be nonnegative")
    return counts


def scores_all_methods(
    counts: np.ndarray,
    ctx: CombineContext,
    methods=METHODS,
    backend: str | None = None,
) -> dict[str, np.ndarray]:
    """Scores of several methods over an (N, K, 2) count array.

    Lookup tables over the distinct leaf-count pairs are shared between
    methods, so adding methods is nearly free once the counts are routed.
    """
    counts = _check_counts(counts)
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; expected one of {METHODS}")
    kern = _backend.kernels(backend)
    pairs, inv = _unique_pairs(counts)
    need_n1 = [m for m in methods if m != "pool"]
    if need_n1 and pairs.size and pairs.sum(axis=1).min() < 1:
        raise ValueError(f"methods {need_n1} require every leaf to hold an observation")
    out: dict[str, np.ndarray] = {}
    mass_tab = None
    for m in methods:
        if m in _SCORER_FOR:
            table = scoring.score_table(m, pairs[:, 0], pairs[:, 1])
            out[m] = table[inv].mean(axis=1)
        elif m == "vote":
            table = np.sign(scoring.score_table("prob", pairs[:, 0], pairs[:, 1]))
            out[m] = table[inv].mean(axis=1)
        elif m == "pool":
            sums = counts.sum(axis=1)
            totals = sums.sum(axis=1)
            if totals.size and totals.min() < 1:
                raise ValueError("pool requires at least one observation overall")
            out[m] = sums[:, 0] / totals - 0.5
        elif m == "eva":
            s = ctx.eva_smoothing
            n = pairs.sum(axis=1).astype(np.float64)
            log_ratio_pos = np.log((pairs[:, 0] + s) / (n + 2.0 * s)) - math.log(
                ctx.prior_pos
            )
            log_ratio_neg = np.log((pairs[:, 1] + s) / (n + 2.0 * s)) - math.log(
                1.0 - ctx.prior_pos
            )
            log_a = math.log(ctx.prior_pos) + log_ratio_pos[inv].sum(axis=1)
            log_b = math.log(1.0 - ctx.prior_pos) + log_ratio_neg[inv].sum(axis=1)
            peak = np.maximum(log_a, log_b)
            a = np.exp(log_a - peak)
            b = np.exp(log_b - peak)
            out[m] = (a - b) / (a + b)
        else:
            if mass_tab is None:
                mass_tab = belief.mass_table(pairs[:, 0], pairs[:, 1])
            if m == "dempster":
                folded = kern.dempster_fold(np.ascontiguousarray(mass_tab[inv]))
                out[m] = folded[:, 1] - folded[:, 2]
            else:
                wtab = belief.weight_table(mass_tab)
                folded = kern.cautious_fold(np.ascontiguousarray(wtab[inv]))
                masses = belief.mass_of_batch(folded)
                out[m] = masses[:, 1] - masses[:, 2]
    return out


def combine_batch(
    method: str,
    counts: np.ndarray,
    ctx: CombineContext,
    backend: str | None = None,
) -> np.ndarray:
    """Vectorized :func:`combine` over an (N, K, 2) count array."""
    return scores_all_methods(counts, ctx, methods=(method,), backend=backend)[method]
