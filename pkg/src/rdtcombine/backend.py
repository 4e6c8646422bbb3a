"""Execution backend selection for the hot kernels.

Two interchangeable implementations exist for every hot kernel (tree
construction, routing, belief folding): a numba ``@njit`` version and a
vectorized pure-numpy version.  Both consume identical SplitMix64 draw
sequences, so integer outputs (tree structure, routed counts) are equal
bit-for-bit and float outputs agree to rounding error.

Selection order:

1. explicit ``backend=`` argument on the public functions,
2. the ``RDTCOMBINE_BACKEND`` environment variable (``numba`` or ``numpy``),
3. default: ``numba`` when importable, else ``numpy``.
"""

from __future__ import annotations

import os

ENV_VAR = "RDTCOMBINE_BACKEND"
_CHOICES = ("numba", "numpy")

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False


def resolve(backend: str | None = None) -> str:
    """Resolve a backend name from argument, environment, or default."""
    choice = backend if backend is not None else os.environ.get(ENV_VAR)
    if choice in (None, "", "auto"):
        return "numba" if HAS_NUMBA else "numpy"
    if choice not in _CHOICES:
        raise ValueError(
            f"unknown backend {choice!r}; expected one of {_CHOICES} or 'auto'"
        )
    if choice == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return choice


def kernels(backend: str | None = None):
    """Return the kernel module for the resolved backend."""
    if resolve(backend) == "numba":
        from rdtcombine import _kernels_nb

        return _kernels_nb
    from rdtcombine import _kernels_np

    return _kernels_np
