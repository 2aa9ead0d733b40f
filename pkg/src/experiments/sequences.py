"""
Sequence-level experiments: critic sensitivity to processes with the right
low-order statistics but the wrong run or frequency behavior, and empirical
block-distribution estimation.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from .reports import SeriesReport
from .runner import DEFAULT_CHUNK_SIZE, derive_seed, run_trials
from ..core.blocks import blocks_to_indices
from ..core.errors import InputValidationError, ResourceLimitError
from ..core.probability import mean_and_half_width, product_pmf
from ..core.types import FiniteSource
from ..critics.frequency import FrequencyCritic
from ..critics.runs import RunCritic

logger = logging.getLogger(__name__)

CAP_RULES = ('loglog', 'log-2')
MAX_ESTIMATION_BITS = 16


def cap_for_length(n: int, rule: str = 'loglog') -> int:
    """
    Longest run the capped process allows at length n.

    'loglog' is ceil(log2 log2 n); 'log-2' is ceil(log2 n) - 2. Both are at least 1.
    """
    if rule not in CAP_RULES:
        raise InputValidationError(f"cap rule must be one of {CAP_RULES}, got {rule!r}")
    if n < 4:
        return 1
    if rule == 'loglog':
        return max(1, math.ceil(math.log2(math.log2(n))))
    return max(1, math.ceil(math.log2(n)) - 2)


def sample_run_capped(n: int, count: int, cap: int, q: float, rng: np.random.Generator) -> np.ndarray:
    """
    Bernoulli(q) bits in which any run of zeros or ones that reaches `cap`
    is ended by forcing the opposite symbol.

    Returns:
        Array of shape (count, n)
    """
    if cap < 1:
        raise InputValidationError(f"cap must be >= 1, got {cap}")
    bits = (rng.random((count, n)) < q).astype(np.int64)
    run = np.ones(count, dtype=np.int64)
    for t in range(1, n):
        previous = bits[:, t - 1]
        bits[:, t] = np.where(run >= cap, 1 - previous, bits[:, t])
        run = np.where(bits[:, t] == previous, run + 1, 1)
    return bits


def run_separation_experiment(q: float, lengths: Sequence[int], trials: int, seed: int,
                              cap_rule: str = 'loglog', chunk_size: int = DEFAULT_CHUNK_SIZE,
                              workers: Optional[int] = None) -> SeriesReport:
    """
    Mean run-critic score under i.i.d. Bernoulli(q) and under the run-capped process.

    Args:
        q: Probability of a one, in (0, 1/2]
        lengths: Block lengths
        trials: Trials per length and process
        seed: Master seed
        cap_rule: Rule giving the cap at each length

    Returns:
        SeriesReport with one row per length
    """
    critic = RunCritic(q, max(lengths))
    rows = []
    for n in lengths:
        cap = cap_for_length(n, cap_rule)

        def iid_chunk(rng: np.random.Generator, count: int) -> np.ndarray:
            return critic.score_many((rng.random((count, n)) < q).astype(np.int64))

        def capped_chunk(rng: np.random.Generator, count: int) -> np.ndarray:
            return critic.score_many(sample_run_capped(n, count, cap, q, rng))

        iid_mean, iid_half = mean_and_half_width(
            run_trials(iid_chunk, trials, derive_seed(seed, n, 0), chunk_size, workers))
        capped_mean, capped_half = mean_and_half_width(
            run_trials(capped_chunk, trials, derive_seed(seed, n, 1), chunk_size, workers))
        rows.append({
            'n': n, 'cap': cap,
            'iid_mean': iid_mean, 'iid_mean_half_width': iid_half,
            'capped_mean': capped_mean, 'capped_mean_half_width': capped_half,
        })
        logger.info(f"Run critic at n={n}: i.i.d. {iid_mean:.3f}, capped (cap {cap}) {capped_mean:.3f}")

    iid_bounded = all(row['iid_mean'] <= 1.0 for row in rows)
    capped = [row['capped_mean'] for row in rows]
    non_decreasing = all(b >= a - (ha + hb) for a, b, ha, hb in zip(
        capped, capped[1:],
        [row['capped_mean_half_width'] for row in rows],
        [row['capped_mean_half_width'] for row in rows[1:]],
    ))
    separated = rows[-1]['capped_mean'] - rows[-1]['iid_mean'] >= 1.0
    return SeriesReport(
        name='run_separation', key_columns=['n'], rows=rows,
        passed=iid_bounded and non_decreasing and separated,
        details={'q': q, 'cap_rule': cap_rule, 'trials': trials, 'seed': seed,
                 'iid_bounded': iid_bounded, 'capped_non_decreasing': non_decreasing,
                 'separated_at_largest_length': separated},
    )


def frequency_sensitivity_experiment(true_source: FiniteSource, critic_source: FiniteSource, e0: int,
                                     lengths: Sequence[int], trials: int, seed: int,
                                     chunk_size: int = DEFAULT_CHUNK_SIZE,
                                     workers: Optional[int] = None) -> SeriesReport:
    """
    Mean frequency-critic score, declared against critic_source, on data from true_source.

    Passes when consecutive means increase with their 3-sigma intervals disjoint.
    """
    critic = FrequencyCritic(critic_source, e0)
    k = true_source.alphabet_size
    critic.check_alphabet(k)
    rows = []
    for n in lengths:
        def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
            return critic.score_many(rng.choice(k, size=(count, n), p=true_source.pmf))

        mean, half_width = mean_and_half_width(run_trials(chunk, trials, derive_seed(seed, n), chunk_size, workers))
        rows.append({'n': n, 'mean_score': mean, 'mean_score_half_width': half_width})
        logger.info(f"Frequency critic at n={n}: mean score {mean:.3f} +/- {half_width:.3f}")

    increasing = all(
        b['mean_score'] - b['mean_score_half_width'] > a['mean_score'] + a['mean_score_half_width']
        for a, b in zip(rows, rows[1:])
    )
    return SeriesReport(
        name='frequency_sensitivity', key_columns=['n'], rows=rows, passed=increasing,
        details={'true_pmf': true_source.pmf.tolist(), 'critic_pmf': critic_source.pmf.tolist(),
                 'e0': e0, 'trials': trials, 'seed': seed},
    )


def estimation_experiment(source: FiniteSource, n: int, samples: int, epsilon: float, trials: int, seed: int,
                          chunk_size: int = 100, workers: Optional[int] = None) -> float:
    """
    Fraction of trials in which TVD(empirical distribution of b blocks, p^n) >= epsilon.

    Args:
        source: Source p
        n: Block length
        samples: Number of i.i.d. blocks b per trial
        epsilon: TVD threshold
        trials: Number of trials
        seed: Master seed

    Returns:
        Empirical probability
    """
    k = source.alphabet_size
    if n * math.log2(k) > MAX_ESTIMATION_BITS:
        raise ResourceLimitError(f"block table of {k}^{n} entries exceeds 2^{MAX_ESTIMATION_BITS}")
    if samples < 1:
        raise InputValidationError(f"need at least one block per trial, got {samples}")
    cells = k ** n
    target = product_pmf(source.pmf, n)

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        blocks = rng.choice(k, size=(count * samples, n), p=source.pmf)
        indices = blocks_to_indices(blocks, k).reshape(count, samples)
        offsets = (np.arange(count) * cells)[:, None]
        counts = np.bincount((indices + offsets).ravel(), minlength=count * cells).reshape(count, cells)
        distances = 0.5 * np.abs(counts / samples - target[None, :]).sum(axis=1)
        return (distances >= epsilon).astype(float)

    probability = float(run_trials(chunk, trials, seed, chunk_size, workers).mean())
    logger.info(f"P(TVD >= {epsilon}) with {samples} blocks of length {n}: {probability:.4f}")
    return probability
