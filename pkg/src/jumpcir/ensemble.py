"""Reproducible replicate streams and (optionally parallel) ensemble maps.

Replicate ``r`` of stream ``s`` under master seed ``seed`` always draws from
``SeedSequence(seed, spawn_key=(s, r))``, so results do not depend on the
order, chunking or number of workers that evaluate the replicates.
"""
from __future__ import annotations

from typing import Callable, TypeVar

import numpy as np
from joblib import Parallel, delayed, effective_n_jobs

from .exceptions import InvalidParameter

T = TypeVar("T")

#: stream ids, kept distinct so different draws never share a generator
STREAM_PATHS = 0
STREAM_REFERENCE = 1
STREAM_V = 2
STREAM_NORMAL = 3
STREAM_CHECK = 4


def check_seed(seed) -> int:
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise InvalidParameter(f"seed must be an integer, got {seed!r}") from None
    if not 0 <= seed < 2**64:
        raise InvalidParameter(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def replicate_rng(seed: int, stream: int, r: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(check_seed(seed), spawn_key=(stream, r)))


def _chunk(fn, seed, stream, lo, hi):
    return [fn(replicate_rng(seed, stream, r)) for r in range(lo, hi)]


def map_replicates(fn: Callable[[np.random.Generator], T], n: int, seed: int,
                   stream: int = STREAM_PATHS, n_jobs: int = 1) -> list[T]:
    """Evaluate ``fn(rng_r)`` for ``r = 0..n-1``, in order."""
    if n <= 0:
        raise InvalidParameter(f"the number of replicates must be > 0, got {n}")
    if n_jobs == 1:
        return _chunk(fn, seed, stream, 0, n)
    n_chunks = max(1, min(n, 4 * effective_n_jobs(n_jobs)))
    edges = np.linspace(0, n, n_chunks + 1).astype(int)
    parts = Parallel(n_jobs=n_jobs)(delayed(_chunk)(fn, seed, stream, int(lo), int(hi))
                    for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo)
    return [x for part in parts for x in part]
