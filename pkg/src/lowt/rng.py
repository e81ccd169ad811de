"""Seeded, splittable randomness.

All randomness flows from a single 64-bit user seed. Streams are derived with
``numpy.random.SeedSequence`` spawn keys and drive a Philox (counter-based)
bit generator, so worker ``i`` of a batch can be reproduced without replaying
workers ``0..i-1``.
"""

from __future__ import annotations

import os

import numpy as np

SEED_ENV_VAR = "LOWT_SEED"
DEFAULT_SEED = 20250101

_MAX_SEED = 2**64


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def default_seed() -> int:
    value = os.environ.get(SEED_ENV_VAR)
    if value is None or value == "":
        return DEFAULT_SEED
    return check_seed(int(value, 0))


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream named by ``(seed, *path)``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def random_mask(rng: np.random.Generator, n: int) -> int:
    """Uniform n-bit integer; works for any n (not limited to 63 bits)."""
    if n <= 0:
        return 0
    nbytes = (n + 7) // 8
    value = int.from_bytes(rng.bytes(nbytes), "little")
    return value & ((1 << n) - 1)
