"""Deterministic 64-bit randomness shared by every execution backend.

All randomness in this package flows through SplitMix64.  The generator is
stateless in closed form (draw ``i`` from seed ``s`` is ``mix64(s + (i+1) *
GOLDEN)``), which lets three consumers reproduce *identical* sequences:

* the scalar :class:`Stream` used by pure-Python code,
* vectorized numpy draws (:func:`draws_u64`, :func:`uniforms`),
* the inlined uint64 arithmetic inside the numba kernels.

Seeds for subtasks (trees, folds, trials) are derived with :func:`derive`,
a keyed mixing chain, so results never depend on scheduling or work order.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# 2^-53, turns the top 53 bits of a u64 into a float in [0, 1)
_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive(seed: int, *keys: int) -> int:
    """Derive a child seed as a pure function of ``seed`` and integer keys."""
    h = mix64(seed & MASK64)
    for k in keys:
        h = mix64(((h + GOLDEN) & MASK64) ^ mix64(k & MASK64))
    return h


def fnv1a64(text: str) -> int:
    """FNV-1a hash of a string; stable across processes (unlike ``hash``)."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & MASK64
    return h


class Stream:
    """Sequential SplitMix64 stream with convenience draws."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def randbelow(self, n: int) -> int:
        """Uniform-ish integer in [0, n); modulo reduction, matching kernels."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        return self.next_u64() % n

    def random(self) -> float:
        """Float in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def shuffle(self, items: np.ndarray) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]


def draws_u64(seed: int, count: int) -> np.ndarray:
    """Vectorized equivalent of ``count`` successive ``Stream.next_u64`` draws."""
    states = np.uint64(seed & MASK64) + np.uint64(GOLDEN) * np.arange(
        1, count + 1, dtype=np.uint64
    )
    z = states
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, count: int) -> np.ndarray:
    """Vectorized equivalent of ``count`` successive ``Stream.random`` draws."""
    return (draws_u64(seed, count) >> np.uint64(11)).astype(np.float64) * _INV_2_53
