"""
Distortion and realism certificates for the one-shot random code.

In n-letter use the code alphabet is X^n with source p^n and kernel applied
symbol by symbol; R is the total rate in bits and gamma log2|X^n| equals
gamma n log2 k.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from .reports import Certificate
from .runner import DEFAULT_CHUNK_SIZE, run_trials
from .simulation import max_log_inverse
from ..core.errors import InputValidationError, ResourceLimitError
from ..core.probability import information_density, mean_and_half_width
from ..core.types import DistortionMatrix, FiniteSource, JointPmf, Kernel, marginals_match

logger = logging.getLogger(__name__)

DENSITY_BIN = 1e-6
MAX_EXACT_LENGTH = 64
MAX_DP_STATES = 2_000_000
# Sums within this distance of the threshold count as on it (the set is strict).
THRESHOLD_SLACK = 1e-9
MARGINAL_TOLERANCE = 1e-6
DISTORTION_SLACK = 1e-9


def message_count(rate: float) -> int:
    """floor(2^R), at least 1; R = 0 gives a single message."""
    if rate < 0:
        raise InputValidationError(f"rate must be >= 0, got {rate}")
    return max(1, int(math.floor(2.0 ** rate + 1e-9)))


def a_set_threshold(rate: float, gamma: float, n: int, alphabet_size: int) -> float:
    """log2 floor(2^R) - gamma n log2 k; the set holds pairs whose information density exceeds it."""
    return math.log2(message_count(rate)) - gamma * n * math.log2(alphabet_size)


def _density_values(joint: JointPmf) -> Tuple[np.ndarray, np.ndarray]:
    density = information_density(joint)
    support = joint.matrix > 0
    return density[support], joint.matrix[support]


def a_set_mass(joint: JointPmf, rate: float, gamma: float, n: int = 1, mode: str = 'exact',
               trials: int = 100_000, seed: int = 0, bin_width: float = DENSITY_BIN,
               workers: Optional[int] = None) -> Tuple[float, float]:
    """
    Probability under p^n of the pairs whose summed information density exceeds the threshold.

    Args:
        joint: Single-letter joint pmf
        rate: Total rate R in bits
        gamma: Slack gamma > 0
        n: Block length
        mode: 'exact' (discretized convolution) or 'montecarlo'
        trials: Sample count in Monte Carlo mode
        seed: Seed in Monte Carlo mode
        bin_width: Discretization step of the exact convolution, in bits

    Returns:
        Tuple of (mass, half-width); the half-width is 0 in exact mode
    """
    if n < 1:
        raise InputValidationError(f"block length must be >= 1, got {n}")
    threshold = a_set_threshold(rate, gamma, n, joint.alphabet_size)
    values, weights = _density_values(joint)

    if mode == 'exact':
        if n > MAX_EXACT_LENGTH:
            raise InputValidationError(f"exact mode supports n <= {MAX_EXACT_LENGTH}, got {n}")
        steps = np.round(values / bin_width).astype(np.int64)
        sums, probabilities = np.zeros(1, dtype=np.int64), np.ones(1)
        for _ in range(n):
            combined = (sums[:, None] + steps[None, :]).ravel()
            sums, inverse = np.unique(combined, return_inverse=True)
            probabilities = np.bincount(inverse, weights=(probabilities[:, None] * weights[None, :]).ravel())
            if sums.size > MAX_DP_STATES:
                raise ResourceLimitError(
                    f"information-density convolution exceeds {MAX_DP_STATES} states at bin {bin_width}"
                )
        mass = float(probabilities[sums * bin_width > threshold + THRESHOLD_SLACK].sum())
        return min(mass, 1.0), 0.0

    if mode == 'montecarlo':
        def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
            picks = rng.choice(values.size, size=(count, n), p=weights / weights.sum())
            return (values[picks].sum(axis=1) > threshold + THRESHOLD_SLACK).astype(float)

        indicators = run_trials(chunk, trials, seed, DEFAULT_CHUNK_SIZE, workers)
        return mean_and_half_width(indicators)

    raise InputValidationError(f"unknown mode {mode!r}; expected 'exact' or 'montecarlo'")


def a_set_hoeffding_bound(joint: JointPmf, rate: float, gamma: float, n: int = 1) -> float:
    """
    Hoeffding upper bound on the set mass: exp(-2 (t - n I)^2 / (n w^2)) when the
    threshold t exceeds the mean n I, w being the spread of the information
    density over the support; 1 otherwise.
    """
    threshold = a_set_threshold(rate, gamma, n, joint.alphabet_size)
    values, weights = _density_values(joint)
    mean = float(np.sum(values * weights))
    spread = float(values.max() - values.min())
    margin = threshold - n * mean
    if margin <= 0:
        return 1.0
    if spread == 0:
        return 0.0
    return float(min(1.0, np.exp(-2.0 * margin ** 2 / (n * spread ** 2))))


def theorem2_certificate(source: FiniteSource, kernel: Kernel, d: DistortionMatrix, rate: float, delta: float,
                         epsilon: float, gamma: float, batch_size: int, n: int = 1,
                         a_set_mode: str = 'exact', trials: int = 100_000, seed: int = 0) -> Certificate:
    """
    Distortion bound Delta' and critic-score bound C of the one-shot code.

    Delta' = Delta + eps + (6 Delta / eps) max(d) eta
    C      = (3 Delta / eps) [1 + (B^2 / M + 2 B eta) max_x B log2(2 / p^n(x))]
    eta    = p(A) + 2^(-gamma n log2 k / 2)

    Raises:
        InputValidationError: If eps is not in (0, Delta/2), gamma <= 0, the kernel
            does not preserve the marginal or its distortion exceeds Delta
    """
    if not 0.0 < epsilon < delta / 2.0:
        raise InputValidationError(f"epsilon must lie in (0, delta/2) = (0, {delta / 2}), got {epsilon}")
    if gamma <= 0:
        raise InputValidationError(f"gamma must be positive, got {gamma}")
    if batch_size < 1:
        raise InputValidationError(f"batch size must be >= 1, got {batch_size}")
    if not marginals_match(kernel.induced_output(source), source.pmf, MARGINAL_TOLERANCE):
        raise InputValidationError("kernel does not preserve the source marginal")
    joint = JointPmf.from_kernel(source, kernel)
    expected = d.expected(joint)
    if expected > delta + DISTORTION_SLACK:
        raise InputValidationError(f"kernel distortion {expected:.6g} exceeds delta {delta}")

    mass, _ = a_set_mass(joint, rate, gamma, n, mode=a_set_mode, trials=trials, seed=seed)
    eta = mass + 2.0 ** (-gamma * n * math.log2(source.alphabet_size) / 2.0)
    size = message_count(rate)
    delta_prime = delta + epsilon + (6.0 * delta / epsilon) * d.max * eta
    score_bound = (3.0 * delta / epsilon) * (
        1.0 + (batch_size ** 2 / size + 2.0 * batch_size * eta) * batch_size * max_log_inverse(source, n)
    )
    logger.info(f"Certificate: eta={eta:.4g}, delta'={delta_prime:.4g}, C={score_bound:.4g}")
    return Certificate(
        delta_prime=delta_prime,
        score_bound=score_bound,
        eta=eta,
        a_set_mass=mass,
        a_set_hoeffding=a_set_hoeffding_bound(joint, rate, gamma, n),
        delta=delta,
        epsilon=epsilon,
        gamma=gamma,
        rate=rate,
        batch_size=batch_size,
        n=n,
        codebook_size=size,
    )
