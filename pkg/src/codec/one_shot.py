"""
One-shot random-codebook code.

The posterior encoder draws m with probability proportional to
p(x | y(m)) = prod_t p_{X|Y}(x_t | y(m)_t); the map encoder takes the first
maximizer of the same weight. Decoding is a table lookup. Message indices are
1-based.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from .codebook import Codebook
from ..core.blocks import MAX_TABLE_BITS, all_blocks, as_block
from ..core.errors import BoundViolationError, InputValidationError, NumericalError
from ..core.probability import product_pmf
from ..core.types import FiniteSource, Kernel, marginals_match
from ..rdp.solver import RdpSolution

logger = logging.getLogger(__name__)

ENCODER_MODES = ('posterior', 'map')
# Induced output marginal must match the source this closely for a code built from a solver kernel.
SOLUTION_MARGINAL_TOLERANCE = 1e-6
COLLISION_SLACK = 1e-12


class OneShotCode:
    """Codebook plus the kernel whose backward channel defines the encoder."""

    def __init__(self, codebook: Codebook, kernel: Kernel, source: FiniteSource, mode: str = 'posterior'):
        """
        Args:
            codebook: Reconstruction blocks
            kernel: Single-letter p(y|x), applied symbol by symbol
            source: Source p_X
            mode: 'posterior' or 'map'
        """
        if mode not in ENCODER_MODES:
            raise InputValidationError(f"encoder mode must be one of {ENCODER_MODES}, got {mode!r}")
        k = source.alphabet_size
        if kernel.alphabet_size != k or codebook.alphabet_size != k:
            raise InputValidationError(
                f"source has {k} symbols, kernel {kernel.alphabet_size}, codebook {codebook.alphabet_size}"
            )
        self.codebook = codebook
        self.kernel = kernel
        self.source = source
        self.mode = mode

        output = kernel.induced_output(source)
        joint = source.pmf[:, None] * kernel.matrix
        with np.errstate(divide='ignore'):
            # backward[y, x] = log p(x | y); output symbols never produced are unreachable
            self.log_backward = np.where(
                joint.T > 0, np.log(np.where(joint.T > 0, joint.T, 1.0) / np.maximum(output, 1e-300)[:, None]), -np.inf
            )

    @classmethod
    def from_rdp_solution(cls, solution: RdpSolution, source: FiniteSource, codebook: Codebook,
                          mode: str = 'posterior') -> "OneShotCode":
        kernel = solution.kernel
        if not marginals_match(kernel.induced_output(source), source.pmf, SOLUTION_MARGINAL_TOLERANCE):
            raise InputValidationError("solution kernel does not preserve the source marginal")
        return cls(codebook, kernel, source, mode)

    @property
    def alphabet_size(self) -> int:
        return self.source.alphabet_size

    @property
    def n(self) -> int:
        return self.codebook.n

    def with_mode(self, mode: str) -> "OneShotCode":
        return OneShotCode(self.codebook, self.kernel, self.source, mode)

    def log_weights(self, blocks: np.ndarray) -> np.ndarray:
        """log p(x | y(m)) for every row x of a (B, n) array and every message; shape (B, M)."""
        entries = self.codebook.entries
        if blocks.shape[1] != entries.shape[1]:
            raise InputValidationError(f"code has block length {entries.shape[1]}, got {blocks.shape[1]}")
        weights = self.log_backward[entries[None, :, :], blocks[:, None, :]].sum(axis=2)
        if np.any(np.all(np.isneginf(weights), axis=1)):
            raise NumericalError("every codeword has zero posterior weight for some block")
        return weights

    def posterior(self, x) -> np.ndarray:
        """Q(m | x) over messages 1..M, as a length-M vector."""
        block = as_block(x, self.alphabet_size)
        weights = self.log_weights(block[None, :])[0]
        return np.exp(weights - logsumexp(weights))

    def encode_many(self, blocks: np.ndarray, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        """Encode each row of a (B, n) array; returns 1-based messages."""
        weights = self.log_weights(blocks)
        if self.mode == 'map':
            return np.argmax(weights, axis=1) + 1
        if rng is None:
            raise InputValidationError("the posterior encoder needs an RNG")
        probabilities = np.exp(weights - logsumexp(weights, axis=1, keepdims=True))
        cumulative = np.cumsum(probabilities, axis=1)
        draws = rng.random(blocks.shape[0]) * cumulative[:, -1]
        messages = (cumulative <= draws[:, None]).sum(axis=1)
        return np.minimum(messages, self.codebook.size - 1) + 1

    def encode(self, x, rng: Optional[np.random.Generator] = None) -> int:
        block = as_block(x, self.alphabet_size)
        return int(self.encode_many(block[None, :], rng)[0])

    def decode(self, message: int) -> np.ndarray:
        return self.codebook.entry(message)

    def decode_many(self, messages: np.ndarray) -> np.ndarray:
        messages = np.asarray(messages)
        if messages.min() < 1 or messages.max() > self.codebook.size:
            raise InputValidationError(f"messages must lie in 1..{self.codebook.size}")
        return self.codebook.entries[messages - 1]


def encode(code: OneShotCode, x, rng: Optional[np.random.Generator] = None) -> int:
    return code.encode(x, rng)


def decode(code: OneShotCode, message: int) -> np.ndarray:
    return code.decode(message)


def message_distributions(code: OneShotCode) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact message pmfs of the posterior and map encoders under p_X^n.

    Args:
        code: Code whose source blocks are enumerable

    Returns:
        Tuple of (posterior-encoder pmf, map-encoder pmf), each of length M
    """
    k, n = code.alphabet_size, code.n
    if n * np.log2(k) > MAX_TABLE_BITS:
        raise InputValidationError(f"cannot enumerate {k}^{n} source blocks")
    blocks = all_blocks(k, n)
    p = product_pmf(code.source.pmf, n)
    weights = code.log_weights(blocks)
    posteriors = np.exp(weights - logsumexp(weights, axis=1, keepdims=True))
    posterior_pmf = p @ posteriors
    map_pmf = np.bincount(np.argmax(weights, axis=1), weights=p, minlength=code.codebook.size)
    return posterior_pmf, map_pmf


def collision_bound(batch_size: int, size: int) -> Tuple[float, float]:
    """
    Probability that B uniform draws from M messages are not all distinct, and B^2 / M.

    Args:
        batch_size: Number of draws B
        size: Number of messages M

    Returns:
        Tuple of (exact probability, B^2 / M)
    """
    if batch_size < 1 or size < 1:
        raise InputValidationError(f"need B >= 1 and M >= 1, got B={batch_size}, M={size}")
    if batch_size > size:
        exact = 1.0
    else:
        distinct = np.prod(1.0 - np.arange(batch_size) / size)
        exact = float(np.clip(1.0 - distinct, 0.0, 1.0))
    bound = batch_size ** 2 / size
    if exact > min(1.0, bound) + COLLISION_SLACK:
        raise BoundViolationError(f"collision probability {exact} exceeds B^2/M = {bound}")
    return exact, bound

