"""
Verification of the critic inequality sum_x p^n(x) 2^score(x) <= 1 at a fixed
block length, either by exhaustive enumeration or by Monte Carlo.
"""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .base_critic import Critic
from ..core.blocks import block_range
from ..core.errors import InputValidationError, UnsupportedLengthError
from ..core.probability import CONFIDENCE_SIGMAS, mean_and_half_width

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_BITS = 22
EXHAUSTIVE_CHUNK = 1 << 16
VALIDITY_TOLERANCE = 1e-9


class ValidityReport(BaseModel):
    """Outcome of one validity check; serialized with the key 'pass'."""

    model_config = ConfigDict(populate_by_name=True)

    critic: Dict[str, Any]
    n: int
    mode: str
    sum: float
    half_width: float = 0.0
    trials: Optional[int] = None
    seed: Optional[int] = None
    passed: bool = Field(alias='pass')


class ExhaustiveMoments(BaseModel):
    """Exact moments of a critic under p^n."""

    n: int
    sum: float
    mean_score: float
    exp_positive: float
    mean_positive: float
    max_positive: float
    max_bound: float


def _check_exhaustive(critic: Critic, n: int):
    if not critic.supports_length(n):
        raise UnsupportedLengthError(f"{critic.kind} critic does not support length {n}")
    if n * np.log2(critic.alphabet_size) > MAX_EXHAUSTIVE_BITS:
        raise InputValidationError(
            f"exhaustive check over {critic.alphabet_size}^{n} blocks exceeds 2^{MAX_EXHAUSTIVE_BITS}"
        )


def exhaustive_moments(critic: Critic, n: int) -> ExhaustiveMoments:
    """
    Enumerate every block of length n in chunks and accumulate the moments.

    Args:
        critic: Critic to evaluate
        n: Block length

    Returns:
        ExhaustiveMoments with the validity sum and positive-part statistics
    """
    _check_exhaustive(critic, n)
    k = critic.alphabet_size
    log_pmf = np.log2(critic.source.pmf)
    total = 0.0
    mean_score = 0.0
    exp_positive = 0.0
    mean_positive = 0.0
    max_positive = 0.0

    for start in range(0, k ** n, EXHAUSTIVE_CHUNK):
        blocks = block_range(k, n, start, min(start + EXHAUSTIVE_CHUNK, k ** n))
        log_p = log_pmf[blocks].sum(axis=1)
        p = np.exp2(log_p)
        scores = critic.score_many(blocks)
        positive = np.maximum(scores, 0.0)
        total += float(np.sum(np.exp2(log_p + scores)))
        mean_score += float(np.sum(p * scores))
        exp_positive += float(np.sum(np.exp2(log_p + positive)))
        mean_positive += float(np.sum(p * positive))
        max_positive = max(max_positive, float(positive.max()))

    max_bound = 1.0 + n * float(-log_pmf.min())
    return ExhaustiveMoments(
        n=n, sum=total, mean_score=mean_score, exp_positive=exp_positive,
        mean_positive=mean_positive, max_positive=max_positive, max_bound=max_bound,
    )


def check_validity(critic: Critic, n: int, mode: str = 'exhaustive',
                   trials: int = 100_000, seed: int = 0) -> ValidityReport:
    """
    Check sum_x p^n(x) 2^score(x) <= 1 for one block length.

    Args:
        critic: Critic to check
        n: Block length
        mode: 'exhaustive' or 'montecarlo'
        trials: Sample count in Monte Carlo mode
        seed: RNG seed in Monte Carlo mode

    Returns:
        ValidityReport
    """
    if mode == 'exhaustive':
        return validity_from_moments(critic, exhaustive_moments(critic, n))
    if mode == 'montecarlo':
        if not critic.supports_length(n):
            raise UnsupportedLengthError(f"{critic.kind} critic does not support length {n}")
        if trials < 2:
            raise InputValidationError(f"Monte Carlo validity needs at least 2 trials, got {trials}")
        rng = np.random.default_rng(np.random.SeedSequence([seed, n]))
        blocks = rng.choice(critic.alphabet_size, size=(trials, n), p=critic.source.pmf)
        estimate, half_width = mean_and_half_width(np.exp2(critic.score_many(blocks)), CONFIDENCE_SIGMAS)
        passed = estimate - half_width <= 1.0
        report = ValidityReport(
            critic=critic.describe(), n=n, mode=mode, sum=estimate, half_width=half_width,
            trials=trials, seed=seed, passed=passed,
        )
    else:
        raise InputValidationError(f"unknown validity mode {mode!r}")
    return _logged(critic, report)


def validity_from_moments(critic: Critic, moments: ExhaustiveMoments) -> ValidityReport:
    """Exhaustive ValidityReport from moments already computed for this critic."""
    report = ValidityReport(critic=critic.describe(), n=moments.n, mode='exhaustive', sum=moments.sum,
                            passed=moments.sum <= 1.0 + VALIDITY_TOLERANCE)
    return _logged(critic, report)


def _logged(critic: Critic, report: ValidityReport) -> ValidityReport:
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(level, f"{critic.kind} critic at n={report.n} ({report.mode}): "
                      f"sum={report.sum:.6g} pass={report.passed}")
    return report


def positive_part_stats(critic: Critic, n: int) -> Tuple[float, float, float]:
    """
    Exact (E[2^{delta+}], E[delta+], max delta+) under p^n.

    A valid critic has these at most 2, 1 and max_x log2(2 / p^n(x)).
    """
    moments = exhaustive_moments(critic, n)
    return moments.exp_positive, moments.mean_positive, moments.max_positive
