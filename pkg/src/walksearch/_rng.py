"""Seed plumbing: every stochastic entry point funnels through here."""
from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.Generator"


def as_rng(seed) -> np.random.Generator:
    """Accept an integer seed or a ready generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derived_rng(master_seed: int, counter: int) -> np.random.Generator:
    """Deterministic per-item generator, independent of scheduling order."""
    return np.random.default_rng([int(master_seed), int(counter)])
