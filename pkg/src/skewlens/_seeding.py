"""Seed derivation shared by every stochastic operation."""

from __future__ import annotations

import numpy as np


def rng(seed: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    return np.random.default_rng(seed)


def derive_seeds(seed: int, count: int) -> list[int]:
    """Independent 64-bit child seeds of ``seed``, stable across platforms."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]
