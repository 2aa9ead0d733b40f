"""
Brute-force oracle for binary sources.

With k = 2 a marginal-preserving kernel has one free parameter a = p(1|0);
b = p(0|1) follows from p0 a = p1 b. The oracle sweeps a over a uniform grid
and doubles the grid until the answer settles.
"""

import logging

import numpy as np

from ..core.errors import InfeasibleDistortionError, InputValidationError
from ..core.types import DistortionMatrix

logger = logging.getLogger(__name__)

ORACLE_TOLERANCE = 1e-5
INITIAL_GRID = 1024
MAX_GRID = 1 << 22


def _xlogx(values: np.ndarray) -> np.ndarray:
    safe = np.where(values > 0, values, 1.0)
    return np.where(values > 0, values * np.log2(safe), 0.0)


def _grid_minimum(p0: float, d: np.ndarray, delta: float, grid: int) -> float:
    p1 = 1.0 - p0
    a = np.linspace(0.0, min(1.0, p1 / p0), grid + 1)
    b = p0 * a / p1
    joint = np.stack([p0 * (1 - a), p0 * a, p1 * b, p1 * (1 - b)])
    costs = np.array([d[0, 0], d[0, 1], d[1, 0], d[1, 1]])
    distortion = costs @ joint
    # Both marginals are (p0, p1), so I = sum p log p - 2 sum p_x log p_x.
    marginal_term = 2.0 * float(_xlogx(np.array([p0, p1])).sum())
    information = np.maximum(_xlogx(joint).sum(axis=0) - marginal_term, 0.0)
    feasible = distortion <= delta + 1e-12
    if not feasible.any():
        raise InfeasibleDistortionError(delta, float(distortion.min()))
    return float(information[feasible].min())


def rdp_binary_oracle(p0: float, d: DistortionMatrix, delta: float, grid: int = INITIAL_GRID,
                      tolerance: float = ORACLE_TOLERANCE) -> float:
    """
    Minimum of I(X;Y) over the grid points that meet E d <= delta.

    Args:
        p0: Probability of symbol 0
        d: 2x2 distortion matrix
        delta: Distortion level
        grid: Initial number of grid intervals
        tolerance: Stop once two successive grids agree to this many bits

    Returns:
        Rate in bits
    """
    if d.alphabet_size != 2:
        raise InputValidationError(f"the oracle handles binary sources only, got k={d.alphabet_size}")
    if not 0.0 < p0 < 1.0:
        raise InputValidationError(f"p0 must lie in (0, 1), got {p0}")

    previous = _grid_minimum(p0, d.d, delta, grid)
    while grid < MAX_GRID:
        grid *= 2
        current = _grid_minimum(p0, d.d, delta, grid)
        if abs(current - previous) < tolerance:
            return current
        previous = current
    logger.warning(f"Oracle grid reached {MAX_GRID} points without settling")
    return previous
