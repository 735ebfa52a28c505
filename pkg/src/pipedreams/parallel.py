"""Trial-parallel fan-out over chunks of per-trial keys.

Each trial is a pure function of its key, so splitting the key array into
contiguous chunks and concatenating the results in order gives output that
does not depend on the number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

THREADS_ENV = "PIPEDREAM_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    return threads


def map_keys(fn: Callable[[np.ndarray], object], keys: np.ndarray, threads: int | None = None):
    """Apply ``fn`` to chunks of ``keys`` and concatenate; tuples are concatenated per field."""
    threads = resolve_threads(threads)
    if threads == 1 or keys.shape[0] < 2 * threads:
        return fn(keys)
    chunks = np.array_split(keys, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(fn, chunks))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(field) for field in zip(*parts))
    return np.concatenate(parts)
