"""
Prefix-free lossless coders and the compressor critic log2(1/p^n(x)) - |f(x)|.

Both coders start with the Elias-gamma code of the block length, so the set
of all codewords over all lengths is prefix-free and satisfies Kraft's
inequality.
"""

from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Tuple

import numpy as np

from .base_critic import Critic
from ..core.blocks import all_blocks
from ..core.errors import InputValidationError
from ..core.types import FiniteSource


def elias_gamma_encode(value: int) -> str:
    """Elias-gamma codeword of a positive integer, e.g. 4 -> '00100'."""
    if value < 1:
        raise InputValidationError(f"Elias-gamma encodes positive integers, got {value}")
    binary = bin(value)[2:]
    return '0' * (len(binary) - 1) + binary


def elias_gamma_length(value: int) -> int:
    return 2 * (int(value).bit_length() - 1) + 1


def elias_gamma_decode(bits: str, position: int = 0) -> Tuple[int, int]:
    """
    Read one Elias-gamma codeword.

    Args:
        bits: Bit string
        position: Offset of the codeword

    Returns:
        Tuple of (value, offset just past the codeword)
    """
    zeros = 0
    while position + zeros < len(bits) and bits[position + zeros] == '0':
        zeros += 1
    end = position + 2 * zeros + 1
    if end > len(bits):
        raise InputValidationError("truncated Elias-gamma codeword")
    return int(bits[position + zeros:end], 2), end


def symbol_width(alphabet_size: int) -> int:
    """Bits per raw symbol, ceil(log2 k)."""
    return max(1, (alphabet_size - 1).bit_length())


class PrefixFreeCoder(ABC):
    """A self-delimiting lossless code for blocks of any length."""

    name: str = 'abstract'

    @abstractmethod
    def encode(self, block: np.ndarray, alphabet_size: int) -> str:
        pass

    @abstractmethod
    def decode(self, bits: str, alphabet_size: int) -> np.ndarray:
        pass

    def code_length(self, block: np.ndarray, alphabet_size: int) -> int:
        return len(self.encode(block, alphabet_size))


class RawCoder(PrefixFreeCoder):
    """Elias-gamma length header followed by fixed-width symbols."""

    name = 'raw'

    def encode(self, block: np.ndarray, alphabet_size: int) -> str:
        width = symbol_width(alphabet_size)
        body = ''.join(format(int(s), f'0{width}b') for s in block)
        return elias_gamma_encode(len(block)) + body

    def decode(self, bits: str, alphabet_size: int) -> np.ndarray:
        width = symbol_width(alphabet_size)
        n, position = elias_gamma_decode(bits)
        symbols = [int(bits[position + i * width:position + (i + 1) * width], 2) for i in range(n)]
        return np.array(symbols, dtype=np.int64)

    def code_length(self, block: np.ndarray, alphabet_size: int) -> int:
        return elias_gamma_length(len(block)) + len(block) * symbol_width(alphabet_size)


class Lz78Coder(PrefixFreeCoder):
    """
    LZ78 with an Elias-gamma length header. Each phrase is sent as
    gamma(parent index + 1) followed by the new symbol; a final phrase that is
    already in the dictionary is sent as its index alone, which the decoder
    recognizes because it exactly fills the remaining length.
    """

    name = 'lz78'

    @staticmethod
    def parse(block: np.ndarray) -> List[Tuple[int, Optional[int]]]:
        """LZ78 phrases as (parent index, new symbol or None)."""
        children: Dict[Tuple[int, int], int] = {}
        phrases: List[Tuple[int, Optional[int]]] = []
        node = 0
        for symbol in block:
            symbol = int(symbol)
            child = children.get((node, symbol))
            if child is None:
                phrases.append((node, symbol))
                children[(node, symbol)] = len(children) + 1
                node = 0
            else:
                node = child
        if node != 0:
            phrases.append((node, None))
        return phrases

    def encode(self, block: np.ndarray, alphabet_size: int) -> str:
        width = symbol_width(alphabet_size)
        parts = [elias_gamma_encode(len(block))]
        for parent, symbol in self.parse(block):
            parts.append(elias_gamma_encode(parent + 1))
            if symbol is not None:
                parts.append(format(symbol, f'0{width}b'))
        return ''.join(parts)

    def decode(self, bits: str, alphabet_size: int) -> np.ndarray:
        width = symbol_width(alphabet_size)
        n, position = elias_gamma_decode(bits)
        table: List[List[int]] = [[]]
        output: List[int] = []
        while len(output) < n:
            index, position = elias_gamma_decode(bits, position)
            phrase = table[index - 1]
            if len(phrase) == n - len(output):
                output.extend(phrase)
                break
            symbol = int(bits[position:position + width], 2)
            position += width
            table.append(phrase + [symbol])
            output.extend(table[-1])
        return np.array(output, dtype=np.int64)

    def code_length(self, block: np.ndarray, alphabet_size: int) -> int:
        width = symbol_width(alphabet_size)
        total = elias_gamma_length(len(block))
        for parent, symbol in self.parse(block):
            total += elias_gamma_length(parent + 1)
            if symbol is not None:
                total += width
        return total


CODERS: Dict[str, PrefixFreeCoder] = {
    RawCoder.name: RawCoder(),
    Lz78Coder.name: Lz78Coder(),
}


def get_coder(coder_id: str) -> PrefixFreeCoder:
    if coder_id not in CODERS:
        raise InputValidationError(f"unknown coder {coder_id!r}; expected one of {sorted(CODERS)}")
    return CODERS[coder_id]


def kraft_sum(coder: PrefixFreeCoder, alphabet_size: int, n: int) -> float:
    """sum over all blocks of length n of 2^-|f(x)|."""
    lengths = np.array([coder.code_length(b, alphabet_size) for b in all_blocks(alphabet_size, n)])
    return float(np.sum(np.exp2(-lengths.astype(float))))


class CompressorCritic(Critic):
    """Critic log2(1 / p^n(x)) - |f(x)| for a prefix-free coder f."""

    kind = 'compressor'

    def __init__(self, source: FiniteSource, coder_id: str):
        self.coder = get_coder(coder_id)
        super().__init__(source, {'coder': coder_id})
        self.log_inverse = -np.log2(source.pmf)

    def score(self, block: np.ndarray) -> float:
        surprisal = float(self.log_inverse[block].sum())
        return surprisal - self.coder.code_length(block, self.alphabet_size)


def make_compressor_critic(source: FiniteSource, coder_id: str) -> CompressorCritic:
    return CompressorCritic(source, coder_id)
