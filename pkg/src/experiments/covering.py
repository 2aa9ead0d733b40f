"""
Soft covering and derandomization measurements for random codebooks.
"""

import logging
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .certificates import a_set_mass
from .reports import BoundCheck, SeriesReport
from .runner import derive_seed, run_trials
from ..codec.codebook import sample_codebook
from ..codec.one_shot import OneShotCode, message_distributions
from ..core.blocks import MAX_TABLE_BITS
from ..core.errors import InputValidationError, ResourceLimitError
from ..core.probability import mean_and_half_width, product_pmf, tvd
from ..core.types import FiniteSource, JointPmf, Kernel

logger = logging.getLogger(__name__)

MAX_COVERING_BITS = 16
MAX_EXACT_DERANDOMIZATION_BITS = 12


def backward_channel(source: FiniteSource, kernel: Kernel) -> np.ndarray:
    """p(x | y) as a k x k matrix indexed [y, x]; rows of unused outputs are zero."""
    joint = source.pmf[:, None] * kernel.matrix
    output = joint.sum(axis=0)
    return np.where(output[:, None] > 0, joint.T / np.maximum(output, 1e-300)[:, None], 0.0)


def covering_distribution(backward: np.ndarray, entries: np.ndarray) -> np.ndarray:
    """(1/M) sum_m p(x | y(m)) over all x in X^n, in canonical block order."""
    total = np.zeros(backward.shape[1] ** entries.shape[1])
    for entry in entries:
        total += reduce(np.kron, [backward[y] for y in entry])
    return total / entries.shape[0]


def soft_covering_gap(source: FiniteSource, kernel: Kernel, rate: float, n: int, codebook_trials: int,
                      seed: int, gamma: float = 0.1, chunk_size: int = 10,
                      workers: Optional[int] = None) -> BoundCheck:
    """
    Mean over random codebooks of TVD(Q_X, p^n), with Q_X computed exactly.

    Codebook entries are drawn from the kernel's output marginal. The bound
    reported is p(A) + 2^(tau / 2) at tau = -gamma n log2 k.

    Args:
        source: Source p_X
        kernel: Channel p(y|x)
        rate: Total rate R in bits
        n: Block length
        codebook_trials: Number of codebooks
        seed: Master seed
        gamma: Slack of the bound

    Returns:
        BoundCheck of the mean TVD against the covering bound
    """
    k = source.alphabet_size
    if n * np.log2(k) > MAX_COVERING_BITS:
        raise ResourceLimitError(f"exact covering over {k}^{n} blocks exceeds 2^{MAX_COVERING_BITS}")
    output_pmf = kernel.induced_output(source)
    if np.any(output_pmf <= 0):
        raise InputValidationError("soft covering needs a kernel whose outputs all have positive probability")
    output = FiniteSource(output_pmf / output_pmf.sum())
    backward = backward_channel(source, kernel)
    target = product_pmf(source.pmf, n)

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        gaps = np.empty(count)
        for i in range(count):
            codebook = sample_codebook(output, rate, n, int(rng.integers(2 ** 62)))
            gaps[i] = tvd(covering_distribution(backward, codebook.entries), target)
        return gaps

    gaps = run_trials(chunk, codebook_trials, seed, chunk_size, workers)
    mean, half_width = mean_and_half_width(gaps)
    mass, _ = a_set_mass(JointPmf.from_kernel(source, kernel), rate, gamma, n)
    bound = mass + 2.0 ** (-gamma * n * np.log2(k) / 2.0)
    logger.info(f"Soft covering at R={rate:.4g}, n={n}: mean TVD {mean:.4f} (bound {bound:.4f})")
    return BoundCheck(
        name='soft_covering_tvd', estimate=mean, half_width=half_width, bound=bound,
        passed=bool(mean <= bound + half_width),
        details={'rate': rate, 'n': n, 'gamma': gamma, 'codebook_trials': codebook_trials, 'seed': seed,
                 'a_set_mass': mass},
    )


def derandomization_gap(source: FiniteSource, kernel: Kernel, rate_per_symbol: float, lengths: Sequence[int],
                        trials: int, seed: int, workers: Optional[int] = None) -> SeriesReport:
    """
    TVD between the message distributions of the posterior and map encoders.

    For each n a codebook at total rate rate_per_symbol * n is drawn from the
    source. The distributions are exact when k^n <= 2^12, otherwise
    histograms of `trials` encoded source blocks.
    """
    k = source.alphabet_size
    rows = []
    for n in lengths:
        codebook = sample_codebook(source, rate_per_symbol * n, n, derive_seed(seed, n))
        code = OneShotCode(codebook, kernel, source, 'posterior')
        if n * np.log2(k) <= min(MAX_EXACT_DERANDOMIZATION_BITS, MAX_TABLE_BITS):
            posterior_pmf, map_pmf = message_distributions(code)
            method = 'exact'
        else:
            map_code = code.with_mode('map')
            size = codebook.size

            def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
                blocks = rng.choice(k, size=(count, n), p=source.pmf)
                return np.column_stack([code.encode_many(blocks, rng), map_code.encode_many(blocks)])

            messages = run_trials(chunk, trials, derive_seed(seed, n, 1), workers=workers)
            posterior_pmf = np.bincount(messages[:, 0] - 1, minlength=size) / trials
            map_pmf = np.bincount(messages[:, 1] - 1, minlength=size) / trials
            method = 'montecarlo'
        gap = tvd(posterior_pmf, map_pmf)
        rows.append({'n': n, 'codebook_size': codebook.size, 'gap': gap, 'method': method})
        logger.info(f"Derandomization gap at n={n}: {gap:.4f} ({method})")
    return SeriesReport(name='derandomization_gap', key_columns=['n'], rows=rows,
                        details={'rate_per_symbol': rate_per_symbol, 'seed': seed, 'trials': trials})
