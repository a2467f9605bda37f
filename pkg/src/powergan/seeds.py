"""Deterministic RNG substreams derived from one root seed.

Every random choice in the toolkit (window balancing, batch shuffling and
shifts, latent draws, gradient-penalty mixing, metric projections, patch
positions) draws from a generator obtained here, so any component is
reproducible in isolation from (root seed, stream name, indices).
"""

import zlib

import numpy as np


def substream(root_seed: int, name: str, *indices: int) -> np.random.Generator:
    """Return a generator for the named substream of ``root_seed``.

    The stream name is hashed into the spawn key, so distinct names (and
    distinct index tuples, e.g. stage/epoch) give statistically independent,
    platform-stable streams.
    """
    root = int(root_seed)
    if root < 0:
        raise ValueError("root seed must be non-negative")
    key = (zlib.crc32(name.encode("ascii")),) + tuple(int(i) for i in indices)
    return np.random.default_rng(np.random.SeedSequence(entropy=root, spawn_key=key))


def substream_int(root_seed: int, name: str, *indices: int) -> int:
    """A single 63-bit integer from the named substream (for torch seeding)."""
    return int(substream(root_seed, name, *indices).integers(0, 2**63 - 1))
