from typing import Dict, Mapping, Union

import numpy as np

from .base_critic import NEG_INF_SCORE, Critic
from ..core.blocks import block_to_index, blocks_to_indices
from ..core.errors import InputValidationError, UnsupportedLengthError
from ..core.probability import product_pmf
from ..core.types import ArrayLike, FiniteSource
from ..utils.validator import Validator


def _log_ratio(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore'):
        return np.where(q > 0, np.log2(np.where(q > 0, q, 1.0) / p), -np.inf)


class LikelihoodRatioCritic(Critic):
    """
    Critic log2(q_n(x) / p^n(x)) for sub-probability distributions q_n.

    With a single-letter q, q_n is the product q^n and the score is additive
    over symbols. Zero likelihood under q scores NEG_INF_SCORE.
    """

    kind = 'llr'

    def __init__(self, source: FiniteSource, q: Union[ArrayLike, Mapping[int, ArrayLike]]):
        """
        Args:
            source: Reference distribution p
            q: Single-letter sub-pmf of length k, or a mapping from block length n
               to a sub-pmf over the k^n blocks in canonical order
        """
        k = source.alphabet_size
        self.letter_table = None
        self.length_tables: Dict[int, np.ndarray] = {}

        if isinstance(q, Mapping):
            for n, values in q.items():
                values = np.asarray(values, dtype=float)
                if values.shape != (k ** int(n),):
                    raise InputValidationError(f"q for length {n} must have {k ** int(n)} entries")
                self._check_sub_pmf(values, f"q for length {n}")
                self.length_tables[int(n)] = _log_ratio(values, product_pmf(source.pmf, int(n)))
            metadata = {'q_lengths': sorted(self.length_tables)}
        else:
            values = np.asarray(q, dtype=float)
            if values.shape != (k,):
                raise InputValidationError(f"single-letter q must have {k} entries, got {values.shape}")
            self._check_sub_pmf(values, "q")
            self.letter_table = _log_ratio(values, source.pmf)
            metadata = {'q': values.tolist()}

        super().__init__(source, metadata)

    @staticmethod
    def _check_sub_pmf(values: np.ndarray, name: str):
        is_valid, errors = Validator.validate_sub_pmf(values)
        if not is_valid:
            raise InputValidationError(f"{name} is not a sub-probability: " + "; ".join(errors))

    def supports_length(self, n: int) -> bool:
        return self.letter_table is not None or n in self.length_tables

    def _table_for(self, n: int) -> np.ndarray:
        if n not in self.length_tables:
            raise UnsupportedLengthError(f"llr critic has no q for block length {n}")
        return self.length_tables[n]

    def score(self, block: np.ndarray) -> float:
        if self.letter_table is not None:
            value = float(self.letter_table[block].sum())
        else:
            value = float(self._table_for(len(block))[block_to_index(block, self.alphabet_size)])
        return max(value, NEG_INF_SCORE)

    def score_many(self, blocks: np.ndarray) -> np.ndarray:
        if self.letter_table is not None:
            values = self.letter_table[blocks].sum(axis=1)
        else:
            values = self._table_for(blocks.shape[1])[blocks_to_indices(blocks, self.alphabet_size)]
        return np.maximum(values, NEG_INF_SCORE)


def make_llr_critic(source: FiniteSource, q: Union[ArrayLike, Mapping[int, ArrayLike]]) -> LikelihoodRatioCritic:
    return LikelihoodRatioCritic(source, q)
