import numpy as np

from .base_critic import Critic
from ..core.errors import InputValidationError
from ..core.types import FiniteSource

# |S - q n| below this counts as the exact-frequency branch.
EXACT_FREQUENCY_TOLERANCE = 1e-9
# Guards the inner ceiling against round-off just above an integer.
CEIL_SLACK = 1e-12


def deviation_level(count: np.ndarray, n: int, expected_fraction: float) -> np.ndarray:
    """
    ceil(log2(ceil(|S - q n| / sqrt(n)))) where S differs from q n, else 0.

    Args:
        count: Occurrence counts S, any shape
        n: Block length
        expected_fraction: q(e0)

    Returns:
        Non-negative integer levels as floats
    """
    gap = np.abs(np.asarray(count, dtype=float) - expected_fraction * n)
    inner = np.maximum(np.ceil(gap / np.sqrt(n) - CEIL_SLACK), 1.0)
    level = np.ceil(np.log2(inner) - CEIL_SLACK)
    return np.where(gap < EXACT_FREQUENCY_TOLERANCE, 0.0, np.maximum(level, 0.0))


def wrap_level(level: np.ndarray) -> np.ndarray:
    """The valid-critic transform delta - 2 log2(delta + 3)."""
    return level - 2.0 * np.log2(level + 3.0)


class FrequencyCritic(Critic):
    """Flags blocks whose count of one symbol strays from its expected frequency."""

    kind = 'frequency'

    def __init__(self, source: FiniteSource, e0: int):
        if not 0 <= e0 < source.alphabet_size:
            raise InputValidationError(f"symbol {e0} is outside the alphabet of size {source.alphabet_size}")
        super().__init__(source, {'e0': int(e0)})
        self.e0 = int(e0)
        self.expected_fraction = float(source.pmf[e0])

    def level(self, block: np.ndarray) -> float:
        count = int(np.count_nonzero(block == self.e0))
        return float(deviation_level(count, len(block), self.expected_fraction))

    def score(self, block: np.ndarray) -> float:
        return float(wrap_level(self.level(block)))

    def score_many(self, blocks: np.ndarray) -> np.ndarray:
        counts = np.count_nonzero(blocks == self.e0, axis=1)
        return wrap_level(deviation_level(counts, blocks.shape[1], self.expected_fraction))


def make_frequency_critic(source: FiniteSource, e0: int) -> FrequencyCritic:
    return FrequencyCritic(source, e0)
