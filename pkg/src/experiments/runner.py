"""
Chunked Monte Carlo harness.

Trials are split into fixed-size chunks; chunk i draws from the stream
SeedSequence([seed, i]) and results are concatenated in chunk order, so the
output depends only on (seed, chunk_size, trials), never on the worker count.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional

import numpy as np

from ..core.errors import InputValidationError

logger = logging.getLogger(__name__)

THREADS_ENV = 'ALGREALISM_THREADS'
DEFAULT_CHUNK_SIZE = 1000

# fn(rng, count) -> array whose first axis has `count` rows, one per trial
ChunkFunction = Callable[[np.random.Generator, int], np.ndarray]


def thread_cap() -> Optional[int]:
    """ALGREALISM_THREADS as an integer, or None when unset."""
    raw = os.getenv(THREADS_ENV)
    if raw is None:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise InputValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if cap < 1:
        raise InputValidationError(f"{THREADS_ENV} must be >= 1, got {cap}")
    return cap


def resolve_workers(workers: Optional[int] = None) -> int:
    """Explicit worker count capped by ALGREALISM_THREADS, else ALGREALISM_THREADS, else 1."""
    cap = thread_cap()
    if workers is None:
        return cap or 1
    if workers < 1:
        raise InputValidationError(f"worker count must be >= 1, got {workers}")
    return workers if cap is None else min(workers, cap)


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(chunk_index)]))


def run_trials(fn: ChunkFunction, trials: int, seed: int, chunk_size: int = DEFAULT_CHUNK_SIZE,
               workers: Optional[int] = None) -> np.ndarray:
    """
    Run `trials` independent trials in chunks and stack the per-trial results.

    Args:
        fn: Chunk function taking (rng, count)
        trials: Total number of trials
        seed: Master seed
        chunk_size: Trials per chunk
        workers: Worker threads (None reads ALGREALISM_THREADS)

    Returns:
        Per-trial results in trial order
    """
    if trials < 1:
        raise InputValidationError(f"trials must be >= 1, got {trials}")
    if chunk_size < 1:
        raise InputValidationError(f"chunk size must be >= 1, got {chunk_size}")
    workers = resolve_workers(workers)
    counts = [min(chunk_size, trials - start) for start in range(0, trials, chunk_size)]

    def run_chunk(index: int) -> np.ndarray:
        return np.asarray(fn(chunk_rng(seed, index), counts[index]))

    if workers == 1:
        results: List[np.ndarray] = [run_chunk(i) for i in range(len(counts))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, range(len(counts))))

    logger.debug(f"Ran {trials} trials in {len(counts)} chunks on {workers} worker(s)")
    return np.concatenate(results, axis=0)


def derive_seed(seed: int, *keys: int) -> int:
    """Independent integer seed for a sub-experiment labelled by keys."""
    return int(np.random.SeedSequence([int(seed), *[int(k) for k in keys]]).generate_state(1)[0])
