"""Deterministic seed derivation for independent sample streams.

Every stochastic object in the package consumes an explicit nonnegative
integer seed. Composite constructions give each operand its own stream by
deriving child seeds from the root seed and the operand's structural path:
``derive(seed, k)`` for the k-th operand, ``derive(seed, i, j)`` for nested
positions. Derivation goes through numpy's SeedSequence (entropy = seed,
spawn_key = path), so distinct paths yield statistically independent
streams and the same (seed, path) always yields the same child.
"""

from __future__ import annotations

import numpy as np

_UINT64_WORDS = 2


def check_seed(seed: int) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    return seed


def derive(seed: int, *path: int) -> int:
    """Child seed for the operand at the given structural path."""
    check_seed(seed)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0])


def rng(seed: int) -> np.random.Generator:
    """A PCG64 generator initialized from the given seed."""
    check_seed(seed)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
