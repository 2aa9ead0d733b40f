"""
Empirical total-variation critic for p^{*}-critics on growing prefixes.

For a string of length t, the index n is the one with t in [n B_n, (n+1) B_{n+1}).
The first n B_n symbols are cut into B_n blocks of length n and the raw
score is ceil(A_n * TVD(empirical block distribution, p^n)) with
A_n = ceil((B_n / k^n)^(4/9)). The valid critic is the wrapped value
raw - 2 log2(raw + 3) - L.

L is the smallest non-negative integer that keeps the defining sum at or
below one for every supported index. The raw score depends only on the block
counts, so each sum is computed exactly over the multinomial count vectors.
"""

import itertools
import logging
import math
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.stats import multinomial

from .base_critic import Critic
from .frequency import CEIL_SLACK, wrap_level
from ..core.blocks import empirical_block_distribution
from ..core.errors import InputValidationError, ResourceLimitError, UnsupportedLengthError
from ..core.probability import product_pmf, tvd
from ..core.types import FiniteSource

logger = logging.getLogger(__name__)

# Largest number of count vectors enumerated when fitting L for one index.
MAX_COMPOSITIONS = 200_000
MAX_INDEX = 8

BatchRule = Callable[[int, int], int]

BN_RULES: Dict[str, BatchRule] = {
    'square': lambda k, n: k ** (2 * n),
    'cube': lambda k, n: k ** (3 * n),
}


def get_bn_rule(rule: str) -> BatchRule:
    if rule not in BN_RULES:
        raise InputValidationError(f"unknown B_n rule {rule!r}; expected one of {sorted(BN_RULES)}")
    return BN_RULES[rule]


def composition_count(total: int, parts: int) -> int:
    return math.comb(total + parts - 1, parts - 1)


def compositions(total: int, parts: int) -> np.ndarray:
    """All vectors of `parts` non-negative integers summing to `total`, as rows."""
    rows = []
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        edges = (-1,) + bars + (total + parts - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(parts)])
    return np.array(rows, dtype=np.int64)


class EmpiricalTvdCritic(Critic):
    """Flags strings whose empirical block statistics drift from p^n."""

    kind = 'empirical_tvd'

    def __init__(self, source: FiniteSource, bn_rule: str = 'square', max_index: Optional[int] = None):
        """
        Args:
            source: Reference distribution p
            bn_rule: Name of the batch-count sequence B_n
            max_index: Largest index n supported; defaults to the largest
                       index whose exact validity sum is enumerable
        """
        self.rule = get_bn_rule(bn_rule)
        k = source.alphabet_size
        if max_index is None:
            max_index = 1
            while (max_index < MAX_INDEX
                   and composition_count(self.rule(k, max_index + 1), k ** (max_index + 1)) <= MAX_COMPOSITIONS):
                max_index += 1
        if max_index < 1:
            raise InputValidationError(f"max_index must be >= 1, got {max_index}")

        self.batch_counts = [0] + [self.rule(k, n) for n in range(1, max_index + 2)]
        self.scales = [0] + [
            int(math.ceil((self.batch_counts[n] / k ** n) ** (4.0 / 9.0) - CEIL_SLACK))
            for n in range(1, max_index + 2)
        ]
        self.max_index = max_index
        self.product_tables = {n: product_pmf(source.pmf, n) for n in range(1, max_index + 1)}

        # Temporarily unshifted so fit_offset can evaluate the sums.
        self.offset = 0
        super().__init__(source, {'bn_rule': bn_rule, 'max_index': max_index})
        self.offset = fit_offset(self)
        self.metadata['L'] = self.offset
        logger.debug(f"Empirical TVD critic fitted L={self.offset} for indices 1..{max_index}")

    @property
    def max_supported_length(self) -> int:
        """Longest string the critic scores."""
        n = self.max_index
        return (n + 1) * self.batch_counts[n + 1] - 1

    def supports_length(self, t: int) -> bool:
        return 1 <= t <= self.max_supported_length

    def index_for(self, t: int) -> int:
        """The index n with t in [n B_n, (n+1) B_{n+1}); 0 when t < B_1."""
        if not self.supports_length(t):
            raise UnsupportedLengthError(
                f"empirical TVD critic supports lengths 1..{self.max_supported_length}, got {t}"
            )
        index = 0
        while index < self.max_index and t >= (index + 1) * self.batch_counts[index + 1]:
            index += 1
        return index

    def raw_score(self, block: np.ndarray) -> int:
        n = self.index_for(len(block))
        if n == 0:
            return 0
        count = self.batch_counts[n]
        blocks = block[:n * count].reshape(count, n)
        empirical = empirical_block_distribution(blocks, self.alphabet_size)
        distance = tvd(empirical, self.product_tables[n])
        return int(math.ceil(self.scales[n] * distance - CEIL_SLACK))

    def score(self, block: np.ndarray) -> float:
        return float(wrap_level(self.raw_score(block))) - self.offset

    def index_sum(self, n: int) -> float:
        """
        Exact sum_x p(x) 2^score(x) for strings whose index is n.

        Raises:
            ResourceLimitError: If the count vectors for this index are too many
        """
        if n == 0:
            return float(2.0 ** (wrap_level(0.0) - self.offset))
        k = self.alphabet_size
        count = self.batch_counts[n]
        cells = k ** n
        if composition_count(count, cells) > MAX_COMPOSITIONS:
            raise ResourceLimitError(
                f"{composition_count(count, cells)} count vectors for index {n} exceed {MAX_COMPOSITIONS}"
            )
        counts = compositions(count, cells)
        table = self.product_tables[n]
        probabilities = multinomial.pmf(counts, count, table)
        distances = 0.5 * np.abs(counts / count - table).sum(axis=1)
        raw = np.ceil(self.scales[n] * distances - CEIL_SLACK)
        return float(np.sum(probabilities * np.exp2(wrap_level(raw) - self.offset)))


def fit_offset(critic: EmpiricalTvdCritic, indices: Optional[List[int]] = None) -> int:
    """
    Smallest non-negative integer L that makes every index sum at most one.

    Args:
        critic: Critic whose current offset is zero
        indices: Indices to cover; defaults to 0..max_index

    Returns:
        The offset L
    """
    if indices is None:
        indices = list(range(critic.max_index + 1))
    saved = critic.offset
    critic.offset = 0
    try:
        worst = max(critic.index_sum(n) for n in indices)
    finally:
        critic.offset = saved
    return max(0, int(math.ceil(math.log2(worst) - CEIL_SLACK)))


def make_empirical_tvd_critic(source: FiniteSource, bn_rule: str = 'square',
                              max_index: Optional[int] = None) -> EmpiricalTvdCritic:
    return EmpiricalTvdCritic(source, bn_rule, max_index)
