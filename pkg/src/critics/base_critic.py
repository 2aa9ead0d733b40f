from abc import ABC, abstractmethod
from typing import Any, Dict, Optional
import json
import logging

import numpy as np

from ..core.blocks import BlockLike, as_batch, as_block, concatenate
from ..core.errors import InputValidationError
from ..core.types import FiniteSource

logger = logging.getLogger(__name__)

# Stand-in for a score of minus infinity (zero likelihood under the critic).
NEG_INF_SCORE = -1024.0


class Critic(ABC):
    """
    Base class for all critics.

    A critic maps a block over the source alphabet to a real score in bits and
    must satisfy sum_x p^n(x) 2^score(x) <= 1 for every block length n, where p
    is the source it is declared against. High scores flag unrealistic blocks.
    """

    kind: str = 'abstract'

    def __init__(self, source: FiniteSource, metadata: Optional[Dict[str, Any]] = None):
        """
        Initialize the base critic.

        Args:
            source: Source distribution the validity inequality refers to
            metadata: Constructor parameters, kept for report provenance
        """
        self.source = source
        self.metadata: Dict[str, Any] = dict(metadata or {})

    @property
    def alphabet_size(self) -> int:
        return self.source.alphabet_size

    @abstractmethod
    def score(self, block: np.ndarray) -> float:
        """
        Score one block.

        Args:
            block: Validated one-dimensional array of symbol indices

        Returns:
            Score in bits
        """
        pass

    def score_many(self, blocks: np.ndarray) -> np.ndarray:
        """Score every row of a (count, n) array."""
        return np.array([self.score(row) for row in blocks], dtype=float)

    def score_batch(self, batch: np.ndarray) -> float:
        """Score an ordered batch as the concatenation of its blocks."""
        return self.score(concatenate(as_batch(batch, self.alphabet_size)))

    def supports_length(self, n: int) -> bool:
        return n >= 1

    def __call__(self, symbols: BlockLike) -> float:
        return self.score(as_block(symbols, self.alphabet_size))

    def check_alphabet(self, alphabet_size: int):
        if alphabet_size != self.alphabet_size:
            raise InputValidationError(
                f"{self.kind} critic is declared on {self.alphabet_size} symbols, "
                f"data uses {alphabet_size}"
            )

    def describe(self) -> Dict[str, Any]:
        """Provenance record embedded in reports."""
        return {
            'kind': self.kind,
            'source': self.source.to_dict(),
            'metadata': self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.describe(), sort_keys=True)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.metadata})"


class ConstantCritic(Critic):
    """Scores every block with the same value. Only valid for values <= 0."""

    kind = 'constant'

    def __init__(self, source: FiniteSource, value: float):
        super().__init__(source, {'value': float(value)})
        self.value = float(value)

    def score(self, block: np.ndarray) -> float:
        return self.value

    def score_many(self, blocks: np.ndarray) -> np.ndarray:
        return np.full(blocks.shape[0], self.value)


def make_constant_critic(source: FiniteSource, value: float) -> ConstantCritic:
    return ConstantCritic(source, value)
