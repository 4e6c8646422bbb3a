"""Mass functions on the two-class frame and their combination rules.

The frame has two hypotheses (positive, negative), so a mass function has
four components: the empty set, each singleton, and the whole frame.  Two
combination rules are provided:

* the unnormalized conjunctive (Dempster) rule, a bilinear form where
  conflict accumulates on the empty set;
* the cautious rule: masses are mapped to conjunctive weight triples via
  commonalities (closed forms on the two-element frame), combined by
  componentwise minimum, and mapped back.  The minimum makes the rule
  idempotent, which suits dependent sources.

Leaf masses assign the degrees of preference to the singletons and the
total uncertainty to the whole frame.  To keep both rules total, the three
informative components are floored at ``EPS_FLOOR`` at construction and the
empty set absorbs the (possibly slightly negative) residual so the sum
stays exactly one.  This residual is why a mass on the empty set may sit a
hair below zero; every consumer here tolerates that documented slack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rdtcombine import uncertainty

#: lower bound applied to the informative mass components at construction
EPS_FLOOR = 1e-5

#: numeric slack for validity checks
_TOL = 1e-9
#: the empty-set mass may carry up to two floors' worth of negative residual
_EMPTY_SLACK = 2 * EPS_FLOOR + _TOL


@dataclass(frozen=True)
class MassFunction:
    """Masses on (empty, positive singleton, negative singleton, frame)."""

    empty: float
    pos: float
    neg: float
    omega: float

    def validate(self) -> "MassFunction":
        """Check closure and nonnegativity (with the flooring slack)."""
        total = self.empty + self.pos + self.neg + self.omega
        if abs(total - 1.0) > _TOL:
            raise ValueError(f"mass function sums to {total!r}, not 1")
        if self.pos < -_TOL or self.neg < -_TOL or self.omega < -_TOL:
            raise ValueError("negative mass on an informative component")
        if self.empty < -_EMPTY_SLACK:
            raise ValueError(f"empty-set mass {self.empty!r} below flooring slack")
        return self

    def score(self) -> float:
        return self.pos - self.neg


@dataclass(frozen=True)
class WeightFunction:
    """Conjunctive weights for (positive singleton, negative singleton, empty)."""

    pos: float
    neg: float
    empty: float

    def validate(self) -> "WeightFunction":
        if not (0.0 < self.pos <= 1.0 + _TOL and 0.0 < self.neg <= 1.0 + _TOL):
            raise ValueError("singleton weights must lie in (0, 1]")
        if self.empty <= 0.0:
            raise ValueError("empty-set weight must be positive")
        return self


VACUOUS = MassFunction(empty=0.0, pos=0.0, neg=0.0, omega=1.0)


def mass_from_leaf(leaf, eps: float = EPS_FLOOR) -> MassFunction:
    """Mass function of one leaf from its uncertainty profile.

    Preferences go to the singletons, total uncertainty to the frame; the
    three are floored at ``eps`` and the empty set absorbs the residual.
    """
    prof = uncertainty.profile(leaf)
    pos = max(prof.pref_pos, eps)
    neg = max(prof.pref_neg, eps)
    omega = max(prof.epistemic + prof.aleatoric, eps)
    return MassFunction(empty=1.0 - (pos + neg + omega), pos=pos, neg=neg, omega=omega)


def dempster_pair(a: MassFunction, b: MassFunction) -> MassFunction:
    """Unnormalized conjunctive combination of two mass functions."""
    empty = (
        a.empty * b.empty
        + a.empty * b.pos
        + a.empty * b.neg
        + a.empty * b.omega
        + a.pos * b.empty
        + a.neg * b.empty
        + a.omega * b.empty
        + a.pos * b.neg
        + a.neg * b.pos
    )
    pos = a.pos * b.pos + a.pos * b.omega + a.omega * b.pos
    neg = a.neg * b.neg + a.neg * b.omega + a.omega * b.neg
    omega = a.omega * b.omega
    return MassFunction(empty=empty, pos=pos, neg=neg, omega=omega)


def weights_of(m: MassFunction) -> WeightFunction:
    """Conjunctive weight triple of a mass function (frame mass must be > 0).

    Commonalities on the two-element frame are Q(pos) = m_pos + m_omega,
    Q(neg) = m_neg + m_omega, Q(frame) = m_omega; the weights are their
    ratios.
    """
    if m.omega <= 0.0:
        raise ValueError("weight decomposition needs positive mass on the frame")
    q_pos = m.pos + m.omega
    q_neg = m.neg + m.omega
    return WeightFunction(
        pos=m.omega / q_pos,
        neg=m.omega / q_neg,
        empty=q_pos * q_neg / m.omega,
    )


def cautious_pair(a: WeightFunction, b: WeightFunction) -> WeightFunction:
    """Cautious combination: componentwise minimum of the weights."""
    return WeightFunction(
        pos=min(a.pos, b.pos), neg=min(a.neg, b.neg), empty=min(a.empty, b.empty)
    )


def mass_of(w: WeightFunction) -> MassFunction:
    """Mass function of a weight triple (inverse of :func:`weights_of`).

    Rebuilds commonalities and applies Moebius inversion.  Components that
    come out below the numeric slack signal an invalid weight triple and are
    rejected; tiny float noise is clamped to zero.  The empty set keeps the
    flooring residual (see module docstring), so only values below that
    documented slack are rejected.
    """
    q_pos = w.empty * w.neg
    q_neg = w.empty * w.pos
    q_omega = w.empty * w.pos * w.neg
    omega = q_omega
    pos = q_pos - q_omega
    neg = q_neg - q_omega
    empty = 1.0 - q_pos - q_neg + q_omega
    if pos < -_TOL or neg < -_TOL or omega < -_TOL:
        raise ValueError(f"weight triple {w} does not describe a mass function")
    if empty < -_EMPTY_SLACK:
        raise ValueError(f"weight triple {w} yields empty-set mass {empty!r}")
    return MassFunction(
        empty=empty, pos=max(pos, 0.0), neg=max(neg, 0.0), omega=max(omega, 0.0)
    )


def mass_to_score(m: MassFunction) -> float:
    """Signed score: mass for the positive singleton minus the negative one."""
    return m.pos - m.neg


def mass_table(pos: np.ndarray, neg: np.ndarray, eps: float = EPS_FLOOR) -> np.ndarray:
    """Vectorized :func:`mass_from_leaf` over leaf-count arrays.

    Returns (P, 3) float64 columns (pos, neg, omega); the empty-set mass is
    implied as 1 minus their sum.
    """
    fields = uncertainty.profile_batch(
        np.asarray(pos, dtype=np.float64), np.asarray(neg, dtype=np.float64)
    )
    out = np.empty((len(fields["pref_pos"]), 3), dtype=np.float64)
    out[:, 0] = np.maximum(fields["pref_pos"], eps)
    out[:, 1] = np.maximum(fields["pref_neg"], eps)
    out[:, 2] = np.maximum(fields["epistemic"] + fields["aleatoric"], eps)
    return out


def weight_table(masses: np.ndarray) -> np.ndarray:
    """Vectorized :func:`weights_of` over a (P, 3) mass table."""
    p, q, o = masses[:, 0], masses[:, 1], masses[:, 2]
    out = np.empty_like(masses)
    out[:, 0] = o / (p + o)
    out[:, 1] = o / (q + o)
    out[:, 2] = (p + o) * (q + o) / o
    return out


def mass_of_batch(weights: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mass_of`: (N, 3) weights to (N, 4) masses."""
    wp, wq, we = weights[:, 0], weights[:, 1], weights[:, 2]
    q_pos = we * wq
    q_neg = we * wp
    q_omega = we * wp * wq
    out = np.empty((weights.shape[0], 4), dtype=np.float64)
    out[:, 0] = 1.0 - q_pos - q_neg + q_omega
    out[:, 1] = q_pos - q_omega
    out[:, 2] = q_neg - q_omega
    out[:, 3] = q_omega
    if (
        out[:, 1].min(initial=0.0) < -_TOL
        or out[:, 2].min(initial=0.0) < -_TOL
        or out[:, 3].min(initial=0.0) < -_TOL
        or out[:, 0].min(initial=0.0) < -_EMPTY_SLACK
    ):
        raise ValueError("a weight triple does not describe a mass function")
    np.maximum(out[:, 1:], 0.0, out=out[:, 1:])
    return out
