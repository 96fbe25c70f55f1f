"""Deterministic per-stream random number generation.

Every stochastic routine takes a ``numpy.random.Generator``.  Streams are
derived from a master seed plus an integer key tuple, so stream
(master, k1, k2, ...) is the same bit sequence on every run and on every
worker schedule.
"""

from __future__ import annotations

import numpy as np

# stream-key tags, so different subsystems never collide on the same key
SCRAMBLER_TAG = 1
TRIAL_TAG = 2
SHELL_TAG = 3


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent deterministic generator for (master_seed, *key)."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def trial_stream(master_seed: int, experiment_id: int, trial: int) -> np.random.Generator:
    """Stream for trial `trial` of experiment `experiment_id`."""
    return stream(master_seed, TRIAL_TAG, experiment_id, trial)
