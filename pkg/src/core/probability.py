"""
Exact discrete-probability utilities: total variation, entropy, mutual
information and product distributions. All logarithms are base 2.
"""

from functools import reduce
from typing import Tuple

import numpy as np

from .errors import BoundViolationError, InputValidationError
from .types import ArrayLike, JointPmf, Kernel

# Largest product space enumerated by batch_tvd_bound_check.
MAX_PRODUCT_POINTS = 81
PRODUCT_TVD_SLACK = 1e-12
# Monte Carlo half-widths are this many standard errors.
CONFIDENCE_SIGMAS = 3.0


def tvd(p: ArrayLike, q: ArrayLike) -> float:
    """
    Total variation distance 1/2 * sum |p - q|.

    Args:
        p: First pmf (any shape)
        q: Second pmf, same shape as p

    Returns:
        Distance in [0, 1]
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise InputValidationError(f"TVD needs equal shapes, got {p.shape} and {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def entropy(pmf: ArrayLike) -> float:
    pmf = np.asarray(pmf, dtype=float).ravel()
    support = pmf[pmf > 0]
    return float(-np.sum(support * np.log2(support)))


def binary_entropy(h: float) -> float:
    if h <= 0.0 or h >= 1.0:
        return 0.0
    return float(-h * np.log2(h) - (1.0 - h) * np.log2(1.0 - h))


def mutual_information(joint: JointPmf) -> float:
    """
    I(X;Y) in bits for a joint pmf.

    Args:
        joint: Joint distribution p(x, y)

    Returns:
        Mutual information, clipped at zero against round-off
    """
    p = joint.matrix
    product = np.outer(joint.marginal_x, joint.marginal_y)
    mask = p > 0
    info = float(np.sum(p[mask] * np.log2(p[mask] / product[mask])))
    return max(info, 0.0)


def information_density(joint: JointPmf) -> np.ndarray:
    """Per-pair log2(p(x,y) / (p(x) p(y))); -inf where p(x,y) = 0."""
    p = joint.matrix
    product = np.outer(joint.marginal_x, joint.marginal_y)
    with np.errstate(divide='ignore'):
        return np.where(p > 0, np.log2(np.where(p > 0, p, 1.0) / product), -np.inf)


def product_pmf(pmf: ArrayLike, n: int) -> np.ndarray:
    """
    n-fold product pmf over k^n blocks in canonical (MSB-first) order.

    Args:
        pmf: Single-letter pmf
        n: Number of factors

    Returns:
        Vector of length k^n
    """
    pmf = np.asarray(pmf, dtype=float)
    if n < 1:
        raise InputValidationError(f"product order must be >= 1, got {n}")
    return reduce(np.kron, [pmf] * n)


def batch_tvd_bound_check(p: ArrayLike, q: ArrayLike, batch_size: int) -> Tuple[float, float]:
    """
    Compare TVD(p^B, q^B), computed by full enumeration, with B * TVD(p, q).

    Args:
        p: First single-letter pmf
        q: Second single-letter pmf
        batch_size: Number of product factors B

    Returns:
        Tuple of (exact product TVD, B * TVD(p, q))
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise InputValidationError(f"pmfs must be vectors of equal length, got {p.shape} and {q.shape}")
    if batch_size < 1:
        raise InputValidationError(f"batch size must be >= 1, got {batch_size}")
    if p.shape[0] ** batch_size > MAX_PRODUCT_POINTS:
        raise InputValidationError(
            f"product space of {p.shape[0]}^{batch_size} points exceeds {MAX_PRODUCT_POINTS}"
        )

    exact = tvd(product_pmf(p, batch_size), product_pmf(q, batch_size))
    bound = batch_size * tvd(p, q)
    if exact > bound + PRODUCT_TVD_SLACK:
        raise BoundViolationError(f"product TVD {exact} exceeds {batch_size} x TVD = {bound}")
    return exact, bound


def mean_and_half_width(samples: ArrayLike, sigmas: float = CONFIDENCE_SIGMAS) -> Tuple[float, float]:
    """
    Sample mean and its confidence half-width, sigmas standard errors wide.

    Args:
        samples: One-dimensional sample values
        sigmas: Width of the interval in standard errors

    Returns:
        Tuple of (mean, half-width); the half-width is 0 for a single sample
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise InputValidationError("cannot average an empty sample")
    mean = float(samples.mean())
    if samples.size == 1:
        return mean, 0.0
    return mean, float(sigmas * samples.std(ddof=1) / np.sqrt(samples.size))


def shared_channel_tvd(p: ArrayLike, q: ArrayLike, kernel: Kernel) -> Tuple[float, float, float]:
    """
    Distances when two inputs pass through the same channel.

    Args:
        p: First input pmf
        q: Second input pmf
        kernel: Channel p(y|x) applied to both

    Returns:
        Tuple of (TVD of the joints, TVD of the inputs, TVD of the outputs).
        The first two are equal and bound the third.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    joint_gap = tvd(p[:, None] * kernel.matrix, q[:, None] * kernel.matrix)
    return joint_gap, tvd(p, q), tvd(p @ kernel.matrix, q @ kernel.matrix)


def marginal_tvd(joint_p: JointPmf, joint_q: JointPmf) -> Tuple[float, float]:
    """TVD of two joints and of their x-marginals; the second never exceeds the first."""
    return tvd(joint_p.matrix, joint_q.matrix), tvd(joint_p.marginal_x, joint_q.marginal_x)
