"""Named random streams derived from one 64-bit seed.

Every random draw in the package goes through :func:`stream`, keyed by the
user seed plus a path of names/integers (component, coordinate, replication,
...).  No global RNG state is used, so results do not depend on call order.
"""

from __future__ import annotations

import hashlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def _key_word(k) -> int:
    if isinstance(k, (bool, np.bool_)):
        return int(k)
    if isinstance(k, (int, np.integer)):
        if k < 0:
            raise ValueError("stream keys must be non-negative")
        return int(k)
    digest = hashlib.blake2b(str(k).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MASK:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed


def seed_sequence(seed: int, *keys) -> np.random.SeedSequence:
    return np.random.SeedSequence(check_seed(seed),
                                  spawn_key=tuple(_key_word(k) for k in keys))


def stream(seed: int, *keys) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *keys)))


def derive_seed(seed: int, *keys) -> int:
    """A fresh 64-bit seed for a sub-computation (e.g. one replication)."""
    return int(seed_sequence(seed, *keys).generate_state(1, np.uint64)[0])
