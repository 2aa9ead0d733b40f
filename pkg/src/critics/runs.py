"""
Longest-run critic for Bernoulli(q) sources.

The normalizing sequence a_n uses the exact mean and variance of the longest
run of ones R_n under Bernoulli(q)^n. They come from the recurrence for
u_j(m) = P(no run of m ones in j symbols):

    u_j(m) = 1                                   for j < m
    u_m(m) = 1 - q^m
    u_j(m) = u_{j-1}(m) - (1 - q) q^m u_{j-m-1}(m)   for j > m

with P(R_j >= m) = 1 - u_j(m). Run lengths whose probability is below
2^-TAIL_BITS at the largest supported length are dropped.
"""

import logging
import math
from typing import Tuple

import numpy as np

from .base_critic import Critic
from ..core.errors import InputValidationError, UnsupportedLengthError
from ..core.types import FiniteSource

logger = logging.getLogger(__name__)

TAIL_BITS = 80
DEFAULT_MAX_LENGTH = 4096


def longest_run(block: np.ndarray, symbol: int = 1) -> int:
    """Length of the longest run of `symbol` in a block."""
    return int(longest_runs(np.atleast_2d(block), symbol)[0])


def longest_runs(blocks: np.ndarray, symbol: int = 1) -> np.ndarray:
    """Longest run of `symbol` in each row of a (count, n) array."""
    blocks = np.atleast_2d(blocks)
    count, n = blocks.shape
    positions = np.broadcast_to(np.arange(n), (count, n))
    # Index of the most recent other symbol at or before each position.
    breaks = np.where(blocks != symbol, positions, -1)
    last_break = np.maximum.accumulate(breaks, axis=1)
    return (positions - last_break).max(axis=1)


def longest_run_moments(q: float, max_length: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact E[R_n] and Var(R_n) for n = 0..max_length under Bernoulli(q).

    Args:
        q: Probability of a one
        max_length: Largest block length tabulated

    Returns:
        Tuple of (means, variances), each of length max_length + 1
    """
    if max_length < 1:
        raise InputValidationError(f"max_length must be >= 1, got {max_length}")
    bits_per_one = -math.log2(q)
    typical = math.log(max_length) / -math.log(q) if q < 1 else max_length
    run_cap = min(max_length, int(math.ceil(typical)) + int(math.ceil(TAIL_BITS / bits_per_one)))

    m = np.arange(1, run_cap + 1)
    q_m = q ** m
    columns = np.arange(run_cap)
    no_run = np.ones((max_length + 1, run_cap))

    for j in range(1, max_length + 1):
        row = np.ones(run_cap)
        row[m == j] = 1.0 - q_m[m == j]
        shorter = m < j
        lag = j - m[shorter] - 1
        row[shorter] = (
            no_run[j - 1, shorter]
            - (1.0 - q) * q_m[shorter] * no_run[lag, columns[shorter]]
        )
        no_run[j] = row

    at_least = np.clip(1.0 - no_run, 0.0, 1.0)
    means = at_least.sum(axis=1)
    second_moments = (at_least * (2 * m - 1)).sum(axis=1)
    variances = np.maximum(second_moments - means ** 2, 0.0)
    logger.debug(f"Run moments tabulated up to n={max_length} with run cap {run_cap}")
    return means, variances


class RunCritic(Critic):
    """
    Critic log2(1 + |R(x) - log_{1/q} n|) - a_n on binary blocks, with
    a_n = log2(1 + sd(R_n) + |E[R_n] - log_{1/q} n|).
    """

    kind = 'run'

    def __init__(self, q: float, max_length: int = DEFAULT_MAX_LENGTH):
        """
        Args:
            q: Probability of a one, in (0, 1/2]
            max_length: Largest block length the critic can score
        """
        if not 0.0 < q <= 0.5:
            raise InputValidationError(f"run critic needs q in (0, 0.5], got {q}")
        super().__init__(FiniteSource.bernoulli(q), {'q': float(q), 'max_length': int(max_length)})
        self.q = float(q)
        self.max_length = int(max_length)
        self.means, self.variances = longest_run_moments(self.q, self.max_length)

        lengths = np.arange(self.max_length + 1)
        self.typical_run = np.zeros(self.max_length + 1)
        self.typical_run[1:] = np.log(lengths[1:]) / -math.log(self.q)
        self.offsets = np.log2(
            1.0 + np.sqrt(self.variances) + np.abs(self.means - self.typical_run)
        )

    def supports_length(self, n: int) -> bool:
        return 1 <= n <= self.max_length

    def _check_length(self, n: int):
        if not self.supports_length(n):
            raise UnsupportedLengthError(
                f"run critic supports lengths 1..{self.max_length}, got {n}"
            )

    def normalizer(self, n: int) -> float:
        """The offset a_n."""
        self._check_length(n)
        return float(self.offsets[n])

    def score(self, block: np.ndarray) -> float:
        n = len(block)
        self._check_length(n)
        run = longest_run(block)
        return float(np.log2(1.0 + abs(run - self.typical_run[n])) - self.offsets[n])

    def score_many(self, blocks: np.ndarray) -> np.ndarray:
        n = blocks.shape[1]
        self._check_length(n)
        runs = longest_runs(blocks)
        return np.log2(1.0 + np.abs(runs - self.typical_run[n])) - self.offsets[n]


def make_run_critic(q: float, max_length: int = DEFAULT_MAX_LENGTH) -> RunCritic:
    return RunCritic(q, max_length)
