"""Seed-stream derivation.

Every random draw in the simulator comes from a generator keyed by
(stream constant, user seed, *context).  Separate streams keep concerns
independent: attack configuration never perturbs batch sampling, so runs
that differ only in the adversary draw identical batches.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

INIT_STREAM = 0
BATCH_STREAM = 1
ATTACK_STREAM = 2
PERMUTATION_STREAM = 3
DATASET_STREAM = 4
DEMO_STREAM = 5


def stream_rng(stream: int, seed: int, *context: int) -> np.random.Generator:
    """Generator for one (stream, seed, context) key."""
    if seed < 0:
        raise ConfigError(f"seed {seed} must be non-negative")
    return np.random.default_rng([stream, seed, *context])
