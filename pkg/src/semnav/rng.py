"""Deterministic random streams.

Every stochastic component draws from a counter-based Philox generator keyed by
an explicit 64-bit seed. Streams with different keys are statistically
independent, so per-planner and per-subproblem seeds can be derived with plain
integer mixing without risk of overlap.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def mix(*parts: int) -> int:
    """Mix integers into a 64-bit seed (splitmix64-style finalizer per part)."""
    h = 0x9E3779B97F4A7C15
    for part in parts:
        z = (h + (part & _MASK64) + 0x9E3779B97F4A7C15) & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        h = z ^ (z >> 31)
    return h & _MASK64


def make_stream(seed: int) -> np.random.Generator:
    """Independent counter-based generator for the given seed."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))
