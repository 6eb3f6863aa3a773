"""Counter-based random streams.

Every random draw in the package comes from a Philox generator keyed by a
64-bit master seed plus a tuple of stream indices, so any sample can be
replayed in isolation and worker count never changes results.
"""
from __future__ import annotations

import numpy as np


def stream(seed: int, *index: int) -> np.random.Generator:
    """Generator for stream ``index`` under master ``seed``."""
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    ss = np.random.SeedSequence([int(seed), *(int(i) for i in index)])
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an integer seed, or None (fresh entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.Generator(np.random.Philox())
    return stream(int(rng))
