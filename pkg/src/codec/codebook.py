import json
import logging
import math
from typing import Any, Dict, Optional

import numpy as np

from ..core.blocks import as_batch, format_block
from ..core.errors import InputValidationError, ResourceLimitError
from ..core.types import FiniteSource

logger = logging.getLogger(__name__)

# Largest codebook sampled, in stored symbols (M * n).
MAX_CODEBOOK_SYMBOLS = 1 << 26


def codebook_size(rate: float) -> int:
    """M = floor(2^R)."""
    if not np.isfinite(rate) or rate <= 0:
        raise InputValidationError(f"codebook rate must be > 0 bits, got {rate}")
    if rate >= 62:
        raise ResourceLimitError(f"a codebook at {rate} bits has more than 2^62 entries")
    # Tolerates rates given as log2(M) with round-off.
    return max(1, int(math.floor(2.0 ** rate + 1e-9)))


class Codebook:
    """
    M = floor(2^R) reconstruction blocks of length n, indexed 1..M.

    Entries are stored as an (M, n) integer array; the array is read-only.
    """

    def __init__(self, entries: np.ndarray, rate: float, alphabet_size: int, seed: Optional[int] = None):
        entries = as_batch(np.asarray(entries, dtype=np.int64), alphabet_size).copy()
        if entries.shape[0] != codebook_size(rate):
            raise InputValidationError(
                f"a rate-{rate} codebook needs {codebook_size(rate)} entries, got {entries.shape[0]}"
            )
        entries.setflags(write=False)
        self.entries = entries
        self.rate = float(rate)
        self.alphabet_size = int(alphabet_size)
        self.seed = seed

    @property
    def size(self) -> int:
        return int(self.entries.shape[0])

    @property
    def n(self) -> int:
        return int(self.entries.shape[1])

    def entry(self, message: int) -> np.ndarray:
        """The block y(m) for a 1-based message index."""
        if not 1 <= message <= self.size:
            raise InputValidationError(f"message {message} is outside 1..{self.size}")
        return self.entries[message - 1].copy()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rate': self.rate,
            'n': self.n,
            'alphabet_size': self.alphabet_size,
            'seed': self.seed,
            'entries': [format_block(row) for row in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Codebook":
        try:
            data = json.loads(text)
            entries = [[int(ch, 36) for ch in row] for row in data['entries']]
            return cls(np.array(entries, dtype=np.int64), data['rate'], data['alphabet_size'], data.get('seed'))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InputValidationError):
                raise
            raise InputValidationError(f"malformed codebook JSON: {e}") from e


def sample_codebook(source: FiniteSource, rate: float, n: int, seed: int,
                    max_symbols: int = MAX_CODEBOOK_SYMBOLS) -> Codebook:
    """
    Draw floor(2^R) blocks with i.i.d. symbols from the source.

    Args:
        source: Distribution of each entry symbol
        rate: Rate R in bits (total, not per symbol)
        n: Block length
        seed: RNG seed; the same seed gives the same codebook
        max_symbols: Memory budget in stored symbols

    Returns:
        Codebook
    """
    if n < 1:
        raise InputValidationError(f"block length must be >= 1, got {n}")
    size = codebook_size(rate)
    if size * n > max_symbols:
        raise ResourceLimitError(f"codebook of {size} x {n} symbols exceeds the budget of {max_symbols}")
    rng = np.random.default_rng(seed)
    entries = rng.choice(source.alphabet_size, size=(size, n), p=source.pmf)
    logger.debug(f"Sampled codebook of {size} blocks of length {n} (seed {seed})")
    return Codebook(entries, rate, source.alphabet_size, seed)
