"""
Batch simulation of the one-shot code and the Monte Carlo checks of the
critic-score bound and the birthday bound.
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from .reports import BoundCheck, Estimate, SeriesReport, TrialReport
from .runner import DEFAULT_CHUNK_SIZE, derive_seed, run_trials
from ..codec.codebook import codebook_size
from ..codec.one_shot import OneShotCode, collision_bound
from ..core.errors import InputValidationError
from ..core.probability import CONFIDENCE_SIGMAS, mean_and_half_width
from ..core.types import DistortionMatrix, FiniteSource
from ..critics.base_critic import Critic

logger = logging.getLogger(__name__)


def critic_names(critics: Sequence[Critic]) -> List[str]:
    """Report keys: the critic kind, suffixed with its position when kinds repeat."""
    kinds = [critic.kind for critic in critics]
    return [kind if kinds.count(kind) == 1 else f'{kind}_{i}' for i, kind in enumerate(kinds)]


def has_collision(messages: np.ndarray) -> np.ndarray:
    """Whether each row of a (count, B) message array repeats a message."""
    ordered = np.sort(messages, axis=1)
    return np.any(ordered[:, 1:] == ordered[:, :-1], axis=1)


def max_log_inverse(source: FiniteSource, n: int) -> float:
    """max_x log2(2 / p^n(x))."""
    return 1.0 + n * float(-np.log2(source.min_probability))


def simulate_batch(code: OneShotCode, batch_size: int, critics: Sequence[Critic], distortion: DistortionMatrix,
                   trials: int, seed: int, chunk_size: int = DEFAULT_CHUNK_SIZE,
                   workers: Optional[int] = None) -> TrialReport:
    """
    Compress B source blocks separately and inspect the reconstructed batch.

    Args:
        code: One-shot code applied to each block
        batch_size: Number of blocks B per trial
        critics: Critics scoring the ordered concatenation of the B reconstructions
        distortion: Single-letter distortion
        trials: Number of trials
        seed: Master seed
        chunk_size: Trials per RNG chunk
        workers: Worker threads

    Returns:
        TrialReport with 3-sigma half-widths
    """
    if batch_size < 1:
        raise InputValidationError(f"batch size must be >= 1, got {batch_size}")
    k, n = code.alphabet_size, code.n
    distortion_alphabet = distortion.alphabet_size
    if distortion_alphabet != k:
        raise InputValidationError(f"distortion is over {distortion_alphabet} symbols, code over {k}")
    for critic in critics:
        critic.check_alphabet(k)
        if not critic.supports_length(n * batch_size):
            raise InputValidationError(f"{critic.kind} critic cannot score batches of length {n * batch_size}")

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        sources = rng.choice(k, size=(count * batch_size, n), p=code.source.pmf)
        messages = code.encode_many(sources, rng)
        reconstructions = code.decode_many(messages)
        messages = messages.reshape(count, batch_size)
        columns = [
            distortion.d[sources, reconstructions].reshape(count, -1).mean(axis=1),
            has_collision(messages).astype(float),
        ]
        batches = reconstructions.reshape(count, batch_size * n)
        columns.extend(critic.score_many(batches) for critic in critics)
        return np.column_stack(columns)

    results = run_trials(chunk, trials, seed, chunk_size, workers)
    scores: Dict[str, Estimate] = {}
    for name, column in zip(critic_names(critics), results[:, 2:].T):
        scores[name] = Estimate.from_samples(column)

    report = TrialReport(
        trials=trials,
        n=n,
        batch_size=batch_size,
        seed=seed,
        mean_distortion=Estimate.from_samples(results[:, 0]),
        critic_scores=scores,
        collision_rate=Estimate.from_samples(results[:, 1]),
        config={'codebook': code.codebook.to_dict() if code.codebook.size <= 256 else None,
                'mode': code.mode, 'critics': [critic.describe() for critic in critics]},
    )
    logger.info(
        f"Simulated {trials} batches of {batch_size}: distortion {report.mean_distortion.estimate:.4f}, "
        f"collisions {report.collision_rate.estimate:.4f}"
    )
    return report


def lemma1_bound_check(source: FiniteSource, rate: float, batch_size: int, n: int, critic: Critic,
                       codebook_trials: int, message_draws: int, seed: int,
                       chunk_size: int = 100, workers: Optional[int] = None) -> BoundCheck:
    """
    Mean positive critic score of B uniformly picked entries of a random codebook.

    The bound is 1 + (B^2 / M) * max_x B log2(2 / p^n(x)). Each codebook
    contributes the mean over `message_draws` batches, so the half-width
    is over codebooks.
    """
    critic.check_alphabet(source.alphabet_size)
    size = codebook_size(rate)
    k = source.alphabet_size

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        values = np.empty(count)
        for i in range(count):
            entries = rng.choice(k, size=(size, n), p=source.pmf)
            picks = rng.integers(size, size=(message_draws, batch_size))
            batches = entries[picks].reshape(message_draws, batch_size * n)
            values[i] = np.maximum(critic.score_many(batches), 0.0).mean()
        return values

    values = run_trials(chunk, codebook_trials, seed, chunk_size, workers)
    mean, half_width = mean_and_half_width(values)
    bound = 1.0 + (batch_size ** 2 / size) * batch_size * max_log_inverse(source, n)
    passed = bool(mean <= bound + half_width)
    if not passed:
        logger.warning(f"Mean positive score {mean:.4f} exceeds the bound {bound:.4f}")
    return BoundCheck(
        name='lemma1_positive_score', estimate=mean, half_width=half_width, bound=bound, passed=passed,
        details={'rate': rate, 'codebook_size': size, 'batch_size': batch_size, 'n': n,
                 'critic': critic.describe(), 'codebook_trials': codebook_trials,
                 'message_draws': message_draws, 'seed': seed},
    )


def lemma1_grid(source: FiniteSource, rates: Sequence[float], batch_sizes: Sequence[int], n: int,
                critics: Sequence[Critic], codebook_trials: int, message_draws: int, seed: int,
                workers: Optional[int] = None) -> SeriesReport:
    """
    lemma1_bound_check over every (critic, rate, batch size) cell.

    Cells whose mean positive score is zero are counted in
    details['vacuous_cells'].
    """
    rows = []
    for name, critic in zip(critic_names(critics), critics):
        for rate in rates:
            for batch_size in batch_sizes:
                check = lemma1_bound_check(source, rate, batch_size, n, critic, codebook_trials, message_draws,
                                           derive_seed(seed, len(rows)), workers=workers)
                rows.append({
                    'critic': name, 'rate': rate, 'batch_size': batch_size,
                    'mean_positive': check.estimate, 'mean_positive_half_width': check.half_width,
                    'bound': check.bound, 'passed': check.passed,
                })
    vacuous = sum(1 for row in rows if row['mean_positive'] == 0.0)
    if vacuous == len(rows):
        logger.warning("No grid cell produced a positive critic score")
    return SeriesReport(
        name='lemma1_grid', key_columns=['critic', 'rate', 'batch_size'], rows=rows,
        passed=all(row['passed'] for row in rows),
        details={'n': n, 'codebook_trials': codebook_trials, 'message_draws': message_draws, 'seed': seed,
                 'vacuous_cells': vacuous, 'critics': [critic.describe() for critic in critics]},
    )


def claim2_empirical(batch_size: int, size: int, trials: int, seed: int,
                     chunk_size: int = DEFAULT_CHUNK_SIZE, workers: Optional[int] = None) -> BoundCheck:
    """
    Empirical rate at which B uniform messages out of M collide.

    Passes when the rate lies within 3 sigma of the exact probability, sigma
    taken at the exact probability.
    """
    exact, bound = collision_bound(batch_size, size)

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        return has_collision(rng.integers(size, size=(count, batch_size))).astype(float)

    rate = float(run_trials(chunk, trials, seed, chunk_size, workers).mean())
    half_width = CONFIDENCE_SIGMAS * float(np.sqrt(exact * (1.0 - exact) / trials))
    passed = bool(abs(rate - exact) <= half_width + 1e-12)
    if not passed:
        logger.warning(f"Collision rate {rate:.5f} is more than 3 sigma from {exact:.5f} (B={batch_size}, M={size})")
    return BoundCheck(
        name='collision_rate', estimate=rate, half_width=half_width, bound=min(1.0, bound), passed=passed,
        details={'exact': exact, 'birthday_bound': bound, 'batch_size': batch_size, 'size': size,
                 'trials': trials, 'seed': seed},
    )
