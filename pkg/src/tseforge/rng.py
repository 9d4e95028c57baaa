"""Deterministic random number plumbing.

All randomness in the toolkit flows through numpy Generators backed by the
counter-based Philox bit generator, keyed by a stable hash of (global seed,
item key...). Output is therefore independent of worker scheduling: every
corpus item owns its own stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

SeededRng = np.random.Generator


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from the given parts (ints, strings, floats)."""
    h = hashlib.sha256()
    for part in parts:
        h.update(repr(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest()[:8], "big")


def make_rng(seed: int) -> SeededRng:
    """Generator over a Philox counter stream keyed by `seed`."""
    return np.random.Generator(np.random.Philox(key=seed))


def item_rng(global_seed: int, *key: object) -> SeededRng:
    """Per-item generator derived from the global seed and a stable key."""
    return make_rng(derive_seed(global_seed, *key))
