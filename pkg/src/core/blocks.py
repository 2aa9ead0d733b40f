"""
Blocks (fixed-length symbol sequences) and batches (ordered lists of
equal-length blocks), stored as integer numpy arrays of shape (n,) and (B, n).
"""

from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InputValidationError
from .types import DistortionMatrix
from ..utils.validator import Validator

# Largest block-distribution table, in log2 entries.
MAX_TABLE_BITS = 20

BlockLike = Union[Sequence[int], np.ndarray, str]


def parse_block(text: str) -> np.ndarray:
    """Parse a string of base-k digits, e.g. '0110', into a block."""
    text = text.strip()
    if not text or not text.isalnum():
        raise InputValidationError(f"not a block of digits: {text!r}")
    return np.array([int(ch, 36) for ch in text], dtype=np.int64)


def format_block(block: np.ndarray) -> str:
    return "".join(np.base_repr(int(s), 36).lower() for s in block)


def as_block(symbols: BlockLike, alphabet_size: int) -> np.ndarray:
    """
    Validate and convert symbols to a block.

    Args:
        symbols: Sequence of symbol indices or a digit string
        alphabet_size: Alphabet size k

    Returns:
        One-dimensional int64 array
    """
    block = parse_block(symbols) if isinstance(symbols, str) else np.asarray(symbols, dtype=np.int64)
    if block.ndim != 1:
        raise InputValidationError(f"a block must be one-dimensional, got shape {block.shape}")
    is_valid, errors = Validator.validate_symbols(block, alphabet_size)
    if not is_valid:
        raise InputValidationError("Invalid block: " + "; ".join(errors))
    return block


def as_batch(blocks: Union[Iterable[BlockLike], np.ndarray], alphabet_size: int) -> np.ndarray:
    """
    Validate and stack blocks into a (B, n) batch.

    Args:
        blocks: Blocks of a common length, in order
        alphabet_size: Alphabet size k

    Returns:
        Two-dimensional int64 array
    """
    if isinstance(blocks, np.ndarray) and blocks.ndim == 2:
        batch = blocks.astype(np.int64, copy=False)
    else:
        rows = [as_block(b, alphabet_size) for b in blocks]
        if not rows:
            raise InputValidationError("a batch needs at least one block")
        lengths = {row.shape[0] for row in rows}
        if len(lengths) != 1:
            raise InputValidationError(f"batch blocks have different lengths: {sorted(lengths)}")
        batch = np.stack(rows)
    is_valid, errors = Validator.validate_symbols(batch, alphabet_size)
    if not is_valid:
        raise InputValidationError("Invalid batch: " + "; ".join(errors))
    return batch


def block_to_index(block: np.ndarray, alphabet_size: int) -> int:
    """Base-k positional index, most significant symbol first."""
    index = 0
    for symbol in block:
        index = index * alphabet_size + int(symbol)
    return index


def blocks_to_indices(blocks: np.ndarray, alphabet_size: int) -> np.ndarray:
    """Vectorized block_to_index over the rows of a 2-D array."""
    n = blocks.shape[1]
    weights = alphabet_size ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return blocks @ weights


def index_to_block(index: int, alphabet_size: int, n: int) -> np.ndarray:
    block = np.zeros(n, dtype=np.int64)
    for position in range(n - 1, -1, -1):
        index, block[position] = divmod(index, alphabet_size)
    return block


def all_blocks(alphabet_size: int, n: int) -> np.ndarray:
    """All k^n blocks of length n as rows, in canonical index order."""
    return block_range(alphabet_size, n, 0, alphabet_size ** n)


def block_range(alphabet_size: int, n: int, start: int, stop: int) -> np.ndarray:
    """Blocks with canonical indices start..stop-1, as rows."""
    indices = np.arange(start, stop, dtype=np.int64)
    powers = alphabet_size ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % alphabet_size


def additive_distortion(batch_x: np.ndarray, batch_y: np.ndarray, distortion: DistortionMatrix) -> float:
    """
    Per-symbol distortion averaged over a whole batch.

    Args:
        batch_x: Source batch, shape (B, n) or (n,)
        batch_y: Reconstruction batch, same shape
        distortion: Single-letter distortion

    Returns:
        (1/B) sum_k (1/n) sum_t d(x_t^k, y_t^k)
    """
    batch_x = np.atleast_2d(batch_x)
    batch_y = np.atleast_2d(batch_y)
    if batch_x.shape != batch_y.shape:
        raise InputValidationError(f"batches differ in shape: {batch_x.shape} vs {batch_y.shape}")
    return float(distortion.d[batch_x, batch_y].mean())


def empirical_block_distribution(batch: np.ndarray, alphabet_size: int) -> np.ndarray:
    """
    Empirical distribution of the blocks of a batch over all k^n blocks.

    Args:
        batch: Batch of shape (B, n)
        alphabet_size: Alphabet size k

    Returns:
        Frequency vector of length k^n in canonical order
    """
    batch = np.atleast_2d(batch)
    n = batch.shape[1]
    if n * np.log2(alphabet_size) > MAX_TABLE_BITS:
        raise InputValidationError(
            f"block table of {alphabet_size}^{n} entries exceeds 2^{MAX_TABLE_BITS}"
        )
    counts = np.bincount(blocks_to_indices(batch, alphabet_size), minlength=alphabet_size ** n)
    return counts / batch.shape[0]


def concatenate(batch: np.ndarray) -> np.ndarray:
    """Ordered concatenation of a batch into a single block."""
    return np.atleast_2d(batch).reshape(-1)
