from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np


def default_workers() -> int:
    env = os.environ.get("TREESPEC_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def map_chunks(fn: Callable[[np.ndarray], np.ndarray], grid: np.ndarray,
               workers: int | None = None, min_chunk: int = 512) -> np.ndarray:
    """Apply ``fn`` to contiguous chunks of ``grid`` and concatenate in order."""
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(grid) < 2 * min_chunk:
        return fn(grid)
    chunks = np.array_split(grid, min(workers * 4, max(1, len(grid) // min_chunk)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts)
