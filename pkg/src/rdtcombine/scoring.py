"""Per-leaf scoring functions and score aggregation.

Every scorer maps leaf counts to a signed score whose sign carries the
predicted class: positive for the positive class, negative for the negative
class.  ``prob``, ``laplace`` and ``cb`` live in [-0.5, 0.5]; ``pls`` lives
in [-1, 1].  All four agree in sign for every leaf.
"""

from __future__ import annotations

import numpy as np

from rdtcombine import uncertainty
from rdtcombine.forest import LeafStats

#: per-leaf scorer identifiers, in reporting order
SCORERS = ("prob", "laplace", "pls", "cb")


def _counts(leaf) -> tuple[int, int]:
    if isinstance(leaf, LeafStats):
        return leaf.pos, leaf.neg
    pos, neg = leaf
    return int(pos), int(neg)


def score_prob(leaf) -> float:
    """Relative frequency of the positive class, centered at zero."""
    pos, neg = _counts(leaf)
    n = pos + neg
    if n < 1:
        raise ValueError("score_prob requires at least one observation")
    return pos / n - 0.5


def score_laplace(leaf) -> float:
    """Add-one smoothed frequency, centered at zero; defined even for n=0."""
    pos, neg = _counts(leaf)
    return (pos + 1) / (pos + neg + 2) - 0.5


def score_plausibility(leaf) -> float:
    """Difference of the degrees of preference for the two classes."""
    prof = uncertainty.profile(leaf)
    return prof.pref_pos - prof.pref_neg


def score_cb(leaf) -> float:
    """Frequency score damped by how poorly the two classes separate."""
    pos, neg = _counts(leaf)
    n = pos + neg
    if n < 1:
        raise ValueError("score_cb requires at least one observation")
    return (1.0 - uncertainty.separation(leaf)) * (pos / n - 0.5)


def score_table(scorer: str, pos: np.ndarray, neg: np.ndarray) -> np.ndarray:
    """Vectorized scorer over arrays of leaf counts."""
    pos = np.asarray(pos, dtype=np.float64)
    neg = np.asarray(neg, dtype=np.float64)
    n = pos + neg
    if scorer == "prob":
        if np.any(n < 1):
            raise ValueError("score_table('prob') requires n >= 1")
        return pos / n - 0.5
    if scorer == "laplace":
        return (pos + 1.0) / (n + 2.0) - 0.5
    if scorer == "pls":
        fields = uncertainty.profile_batch(pos, neg)
        return fields["pref_pos"] - fields["pref_neg"]
    if scorer == "cb":
        if np.any(n < 1):
            raise ValueError("score_table('cb') requires n >= 1")
        sep = uncertainty.separation_batch(pos, neg)
        return (1.0 - sep) * (pos / n - 0.5)
    raise ValueError(f"unknown scorer {scorer!r}; expected one of {SCORERS}")


def aggregate_avg(scores) -> float:
    """Arithmetic mean of the per-tree scores."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ValueError("cannot aggregate an empty score vector")
    return float(scores.mean())


def aggregate_vote(scores) -> float:
    """Mean of per-tree votes: +1 positive, -1 negative, 0 abstains on zero."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ValueError("cannot aggregate an empty score vector")
    return float(np.sign(scores).mean())
