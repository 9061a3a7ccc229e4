"""Seeded, label-split random streams.

Every stochastic step draws from a generator keyed by ``(seed, label)`` so
runs never share mutable stream state and results do not depend on the order
in which independent runs are executed.
"""
import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _label_key(label: str) -> int:
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def stream(seed: int, label: str = "") -> np.random.Generator:
    """Independent PCG64 generator for ``(seed, label)``."""
    entropy = [int(seed) & _MASK64, _label_key(label)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def child_seed(seed: int, label: str) -> int:
    """Derive a 64-bit seed for a named sub-task."""
    return int(stream(seed, label).integers(0, 2**63))
