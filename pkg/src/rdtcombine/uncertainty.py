"""Leaf-level uncertainty calculus.

Given a leaf's class counts ``[pos, neg]`` this module computes:

* degrees of support for each class via a normalized-likelihood sup-min
  construction: ``support(+) = sup_t min(L(t), 2t - 1)`` where
  ``L(t) = (t/t_hat)^pos * ((1-t)/(1-t_hat))^neg`` and ``t_hat = pos/n``
  (factors with exponent 0 count as 1, which covers pure leaves);
* epistemic uncertainty (min of the two supports) and aleatoric
  uncertainty (one minus their max);
* degrees of preference for each class: the committed remainder
  ``1 - (aleatoric + epistemic)`` goes to the better-supported class, or is
  split evenly on a tie;
* a beta-binomial separation measure: both classes are modelled as
  beta-binomial distributions (n trials, alpha = pos + 1, beta = neg + 1,
  and the mirror image), and ``separation = midpoint height / peak height``
  of the distribution; 1 means indistinguishable, near 0 well separated.

The sup-min problem is solved by bisection: ``L`` is unimodal with maximum
1 at ``t_hat`` and the line is monotone, so ``L(t) - (2t - 1)`` has a
unique sign change on ``[max(t_hat, 1/2), 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln

from rdtcombine.forest import LeafStats

_BISECT_ITERS = 60
_TIE_TOL = 1e-9
_MEMO_MAX_N = 64

_profile_memo: dict[tuple[int, int], "UncertaintyProfile"] = {}
_separation_memo: dict[tuple[int, int], float] = {}


@dataclass(frozen=True)
class UncertaintyProfile:
    """Support, uncertainty, and preference degrees for one leaf."""

    support_pos: float
    support_neg: float
    epistemic: float
    aleatoric: float
    pref_pos: float
    pref_neg: float


@dataclass(frozen=True)
class BetaBinomialSpec:
    """Beta-binomial distribution parameters derived from leaf counts."""

    trials: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("beta-binomial needs at least one trial")
        if self.alpha < 1 or self.beta < 1:
            raise ValueError("alpha and beta must be >= 1")


def _as_counts(leaf) -> tuple[int, int]:
    if isinstance(leaf, LeafStats):
        return leaf.pos, leaf.neg
    pos, neg = leaf
    return int(pos), int(neg)


def support_batch(pos: np.ndarray, neg: np.ndarray) -> np.ndarray:
    """Vectorized degree of support for the positive class.

    ``pos`` and ``neg`` are equal-length integer arrays with ``pos + neg >= 1``.
    For the negative class, swap the arguments.
    """
    pos = np.asarray(pos, dtype=np.float64)
    neg = np.asarray(neg, dtype=np.float64)
    n = pos + neg
    if np.any(n < 1):
        raise ValueError("support requires at least one observation per leaf")
    out = np.ones_like(pos)
    active = neg > 0  # pure-positive leaves have support exactly 1
    if not np.any(active):
        return out
    p = pos[active]
    q = neg[active]
    m = p + q
    t_hat = p / m
    # log L(t) with 0-exponent factors dropped before any division
    log_that = np.where(p > 0, np.log(np.where(p > 0, t_hat, 1.0)), 0.0)
    log_1m_that = np.log(1.0 - t_hat)  # q > 0 ensures t_hat < 1

    def log_like(t: np.ndarray) -> np.ndarray:
        lt = np.where(p > 0, p * (np.log(np.where(t > 0, t, 1.0)) - log_that), 0.0)
        lq = q * (np.log1p(-t) - log_1m_that)
        return lt + lq

    lo = np.maximum(t_hat, 0.5)
    hi = np.ones_like(lo)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        line = 2.0 * mid - 1.0
        # L(mid) >= line means the crossing lies to the right
        with np.errstate(divide="ignore"):
            above = log_like(mid) >= np.log(np.maximum(line, 0.0))
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    out[active] = np.maximum(2.0 * (0.5 * (lo + hi)) - 1.0, 0.0)
    return out


def plausibility(leaf, positive: bool = True) -> float:
    """Degree of support in [0, 1] for one class of a single leaf."""
    pos, neg = _as_counts(leaf)
    if pos + neg < 1:
        raise ValueError("plausibility requires at least one observation")
    if not positive:
        pos, neg = neg, pos
    return float(support_batch(np.array([pos]), np.array([neg]))[0])


def profile_batch(pos: np.ndarray, neg: np.ndarray) -> dict[str, np.ndarray]:
    """Vectorized :func:`profile`: arrays for all six fields."""
    sup_pos = support_batch(pos, neg)
    sup_neg = support_batch(neg, pos)
    epistemic = np.minimum(sup_pos, sup_neg)
    aleatoric = 1.0 - np.maximum(sup_pos, sup_neg)
    committed = 1.0 - (aleatoric + epistemic)
    tie = np.abs(sup_pos - sup_neg) <= _TIE_TOL
    pref_pos = np.where(tie, 0.5 * committed, np.where(sup_pos > sup_neg, committed, 0.0))
    pref_neg = np.where(tie, 0.5 * committed, np.where(sup_neg > sup_pos, committed, 0.0))
    return {
        "support_pos": sup_pos,
        "support_neg": sup_neg,
        "epistemic": epistemic,
        "aleatoric": aleatoric,
        "pref_pos": pref_pos,
        "pref_neg": pref_neg,
    }


def profile(leaf) -> UncertaintyProfile:
    """Full uncertainty profile of one leaf; memoized for small leaves."""
    pos, neg = _as_counts(leaf)
    if pos + neg < 1:
        raise ValueError("profile requires at least one observation")
    key = (pos, neg)
    if pos + neg <= _MEMO_MAX_N:
        cached = _profile_memo.get(key)
        if cached is not None:
            return cached
    fields = profile_batch(np.array([pos]), np.array([neg]))
    result = UncertaintyProfile(**{k: float(v[0]) for k, v in fields.items()})
    if pos + neg <= _MEMO_MAX_N:
        _profile_memo[key] = result
    return result


def bb_log_pmf_table(trials: int, alpha: float, beta: float) -> np.ndarray:
    """log pmf over k = 0..trials, computed with log-gamma for stability."""
    k = np.arange(trials + 1, dtype=np.float64)
    n = float(trials)
    log_choose = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    return log_choose + betaln(k + alpha, n - k + beta) - betaln(alpha, beta)


def bb_pmf(spec: BetaBinomialSpec, k: int) -> float:
    """Beta-binomial pmf at ``k``."""
    if not 0 <= k <= spec.trials:
        raise ValueError(f"k={k} outside 0..{spec.trials}")
    return float(np.exp(bb_log_pmf_table(spec.trials, spec.alpha, spec.beta)[k]))


def separation(leaf) -> float:
    """Class-separation measure in (0, 1] from mirrored beta-binomials.

    The positive-class distribution uses alpha = pos + 1, beta = neg + 1;
    the negative-class one is its mirror image, so both share the same peak
    height and the same midpoint height.  For odd n the midpoint height is
    the mean of the two central pmf values.
    """
    pos, neg = _as_counts(leaf)
    n = pos + neg
    if n < 1:
        raise ValueError("separation requires at least one observation")
    key = (pos, neg)
    cached = _separation_memo.get(key)
    if cached is not None:
        return cached
    log_pmf = bb_log_pmf_table(n, pos + 1.0, neg + 1.0)
    pmf = np.exp(log_pmf)
    if n % 2 == 0:
        mid = pmf[n // 2]
    else:
        mid = 0.5 * (pmf[n // 2] + pmf[n // 2 + 1])
    result = float(mid / pmf.max())
    _separation_memo[key] = result
    return result


def separation_batch(pos: np.ndarray, neg: np.ndarray) -> np.ndarray:
    """Vectorized :func:`separation` over arrays of leaf counts."""
    pos = np.asarray(pos)
    neg = np.asarray(neg)
    return np.array(
        [separation((int(p), int(q))) for p, q in zip(pos.ravel(), neg.ravel())]
    ).reshape(pos.shape)
