"""Deterministic randomness plumbing.

All sampling uses the counter-based Philox generator keyed by explicit
64-bit seeds, so every record's randomness is a pure function of its seed,
independent of platform, thread count, and generation order. Derived seeds
come from splitmix64; dataset splits hash the record seed through SHA-256.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF


def rng_for_seed(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator for a seed; ``stream`` selects an independent jump."""
    bg = np.random.Philox(key=seed & MASK64)
    if stream:
        bg = bg.jumped(stream)
    return np.random.Generator(bg)


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return (x ^ (x >> 31)) & MASK64


def record_seed(master_seed: int, index: int) -> int:
    """Per-record seed derived from the master seed and record index."""
    return splitmix64((master_seed & MASK64) ^ splitmix64(index & MASK64))


def split_of_seed(seed: int, fractions=(0.70, 0.15, 0.15)) -> str:
    """train/val/test assignment from the seed alone (stable across runs)."""
    digest = hashlib.sha256(int(seed & MASK64).to_bytes(8, "little")).digest()
    u = int.from_bytes(digest[:8], "little") / 2**64
    if u < fractions[0]:
        return "train"
    if u < fractions[0] + fractions[1]:
        return "val"
    return "test"
