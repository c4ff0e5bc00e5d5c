"""Seed plumbing: named substreams so one user-facing seed drives everything."""

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def mask64(seed):
    """Clamp an arbitrary integer seed into the non-negative 64-bit range."""
    return int(seed) & _MASK64


def substream(seed, *labels):
    """Return a Generator for the (seed, labels...) stream.

    Streams with different labels are statistically independent, and the
    mapping is stable across runs and platforms (labels hash via crc32).
    """
    keys = [mask64(seed)] + [zlib.crc32(str(label).encode("utf-8")) for label in labels]
    return np.random.default_rng(keys)


def derive_seed(seed, label):
    """Derive an integer sub-seed from a base seed and a string label."""
    return mask64(seed) ^ (zlib.crc32(str(label).encode("utf-8")) << 17)
