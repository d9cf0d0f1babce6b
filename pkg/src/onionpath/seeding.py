"""Stable seed derivation for reproducible, order-independent randomness.

Python's built-in ``hash`` is salted per process, so derived seeds go
through blake2b over the reprs of the parts instead. Anything with a
stable repr (ints, strings, tuples of those) can be a part.
"""

from __future__ import annotations

import hashlib
import random

__all__ = ["stable_seed", "stable_unit", "spawn_rng"]


def stable_seed(*parts) -> int:
    digest = hashlib.blake2b(digest_size=8)
    for part in parts:
        digest.update(repr(part).encode())
        digest.update(b"\x1f")
    return int.from_bytes(digest.digest(), "big")


def stable_unit(*parts) -> float:
    """Deterministic float in [0, 1) derived from the parts."""
    return stable_seed(*parts) / 2**64


def spawn_rng(*parts) -> random.Random:
    return random.Random(stable_seed(*parts))
