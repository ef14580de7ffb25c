"""Reproducible, order-independent random streams.

A stream is keyed by ``(master_seed, stream_id)``. The id (any value with a
stable ``repr``, typically a tuple of strings and ints) is hashed with
SHA-256; the eight little-endian u32 words of the digest, prefixed by the
master seed split into two u32 words, form the entropy of a NumPy
``SeedSequence`` feeding a PCG64 generator.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stream_key(master_seed: int, stream_id) -> list[int]:
    digest = hashlib.sha256(repr(stream_id).encode("utf-8")).digest()
    words = np.frombuffer(digest, dtype="<u4").tolist()
    seed = int(master_seed) & 0xFFFFFFFFFFFFFFFF
    return [seed & 0xFFFFFFFF, seed >> 32, *words]


def seed_stream(master_seed: int, stream_id) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(stream_key(master_seed, stream_id))))
