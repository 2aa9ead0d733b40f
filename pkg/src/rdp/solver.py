"""
Perception-constrained rate-distortion function

    R(Delta) = min I(X;Y)  subject to  p_Y = p_X,  E d(X,Y) <= Delta.

With both marginals fixed, I(X;Y) is the KL divergence of the coupling from
p_X x p_X, so for a multiplier lam the minimizer of I + lam * E d is the
entropic transport plan pi = diag(u) exp(-lam d) (p x p) diag(v). It is
found by log-domain Sinkhorn scaling; lam is bisected until E d = Delta.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.optimize import linprog
from scipy.special import logsumexp

from ..core.errors import InfeasibleDistortionError, InputValidationError, NumericalError
from ..core.probability import entropy, mutual_information, tvd
from ..core.types import DistortionMatrix, FiniteSource, JointPmf, Kernel

logger = logging.getLogger(__name__)

SINKHORN_TOLERANCE = 1e-12
SINKHORN_MAX_ITERATIONS = 20_000
BISECTION_STEPS = 200
DISTORTION_TOLERANCE = 1e-9
MARGINAL_TOLERANCE = 1e-6
# Largest multiplier tried, in nats per unit of normalized distortion.
MAX_MULTIPLIER = 2.0 ** 12
BA_TOLERANCE = 1e-12
BA_MAX_ITERATIONS = 20_000


class RdpSolution(BaseModel):
    """Minimizer of the rate-distortion-perception problem at one distortion level."""

    rate: float
    kernel_matrix: List[List[float]]
    achieved_distortion: float
    marginal_gap: float
    delta: float
    min_distortion: float
    multiplier: Optional[float]
    source_entropy: float
    theorem1_hypothesis_holds: bool

    @property
    def kernel(self) -> Kernel:
        return Kernel(self.kernel_matrix)


def _check_inputs(source: FiniteSource, d: DistortionMatrix, delta: float):
    if d.alphabet_size != source.alphabet_size:
        raise InputValidationError(
            f"distortion is {d.alphabet_size}x{d.alphabet_size}, source has {source.alphabet_size} symbols"
        )
    if not np.isfinite(delta) or delta < 0:
        raise InputValidationError(f"distortion level must be a finite number >= 0, got {delta}")


def min_marginal_preserving_distortion(source: FiniteSource, d: DistortionMatrix) -> Tuple[float, np.ndarray]:
    """
    Smallest E d over couplings whose two marginals both equal p_X.

    Args:
        source: Source distribution
        d: Distortion matrix

    Returns:
        Tuple of (minimal distortion, optimal coupling as a k x k matrix)
    """
    k = source.alphabet_size
    rows = np.kron(np.eye(k), np.ones(k))
    columns = np.kron(np.ones(k), np.eye(k))
    result = linprog(
        d.d.ravel(),
        A_eq=np.vstack([rows, columns]),
        b_eq=np.concatenate([source.pmf, source.pmf]),
        bounds=(0, None),
        method='highs',
    )
    if not result.success:
        raise NumericalError(f"transport LP failed: {result.message}")
    plan = np.maximum(result.x.reshape(k, k), 0.0)
    return float(result.fun), plan


class SinkhornSolver:
    """Entropic transport from p_X to itself with cost d, warm-started across multipliers."""

    def __init__(self, source: FiniteSource, d: DistortionMatrix,
                 tolerance: float = SINKHORN_TOLERANCE, max_iterations: int = SINKHORN_MAX_ITERATIONS):
        self.log_p = np.log(source.pmf)
        self.scale = max(d.max, 1e-300)
        self.cost = d.d / self.scale
        self.distortion = d.d
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.row_potential = np.zeros(source.alphabet_size)
        self.column_potential = np.zeros(source.alphabet_size)

    def plan(self, multiplier: float) -> np.ndarray:
        """Coupling minimizing KL(pi || p x p) + multiplier * E[cost]."""
        log_kernel = self.log_p[:, None] + self.log_p[None, :] - multiplier * self.cost
        a, b = self.row_potential, self.column_potential
        for iteration in range(self.max_iterations):
            a = self.log_p - logsumexp(log_kernel + b[None, :], axis=1)
            b = self.log_p - logsumexp(log_kernel + a[:, None], axis=0)
            log_plan = a[:, None] + b[None, :] + log_kernel
            row_error = np.abs(np.exp(logsumexp(log_plan, axis=1)) - np.exp(self.log_p)).max()
            if row_error < self.tolerance:
                break
        else:
            logger.debug(f"Sinkhorn at multiplier {multiplier:.4g} stopped with row error {row_error:.3g}")
        self.row_potential, self.column_potential = a, b
        return np.exp(log_plan)

    def expected_distortion(self, plan: np.ndarray) -> float:
        return float(np.sum(plan * self.distortion))


def _kernel_from_plan(source: FiniteSource, plan: np.ndarray) -> np.ndarray:
    rows = plan / plan.sum(axis=1, keepdims=True)
    return rows / rows.sum(axis=1, keepdims=True)


def rdp_function(source: FiniteSource, d: DistortionMatrix, delta: float,
                 bisection_steps: int = BISECTION_STEPS,
                 sinkhorn_tolerance: float = SINKHORN_TOLERANCE) -> RdpSolution:
    """
    Solve min I(X;Y) over kernels with p_Y = p_X and E d <= delta.

    Args:
        source: Source distribution p_X
        d: Distortion matrix
        delta: Distortion level
        bisection_steps: Maximum bisection steps on the multiplier
        sinkhorn_tolerance: Row-marginal tolerance of each Sinkhorn solve

    Returns:
        RdpSolution with the rate in bits and an optimal kernel

    Raises:
        InfeasibleDistortionError: If delta is below the minimal achievable distortion
    """
    _check_inputs(source, d, delta)
    min_distortion, lp_plan = min_marginal_preserving_distortion(source, d)
    if delta < min_distortion - DISTORTION_TOLERANCE:
        raise InfeasibleDistortionError(delta, min_distortion)

    solver = SinkhornSolver(source, d, tolerance=sinkhorn_tolerance)
    independent = np.outer(source.pmf, source.pmf)
    multiplier = 0.0

    if solver.expected_distortion(independent) <= delta:
        plan = independent
    else:
        low, high = 0.0, 1.0
        plan = solver.plan(high)
        while solver.expected_distortion(plan) > delta and high < MAX_MULTIPLIER:
            low, high = high, 2.0 * high
            plan = solver.plan(high)

        if solver.expected_distortion(plan) > delta + DISTORTION_TOLERANCE:
            logger.info(f"Distortion {delta:.6g} sits at the feasibility boundary; using the transport LP plan")
            plan = lp_plan
            multiplier = None
        else:
            feasible_plan = plan
            for step in range(bisection_steps):
                middle = 0.5 * (low + high)
                plan = solver.plan(middle)
                if solver.expected_distortion(plan) > delta:
                    low = middle
                else:
                    high, feasible_plan = middle, plan
                if high - low <= 1e-12 * high:
                    break
            plan = feasible_plan
            multiplier = high / solver.scale
            logger.debug(f"Multiplier bisection finished after {step + 1} steps at {multiplier:.6g}")

    kernel_matrix = _kernel_from_plan(source, plan)
    joint = JointPmf.from_kernel(source, Kernel(kernel_matrix))
    rate = mutual_information(joint)
    achieved = d.expected(joint)
    gap = tvd(joint.marginal_y, source.pmf)
    if gap > MARGINAL_TOLERANCE:
        raise NumericalError(f"solver kernel misses the source marginal by {gap:.3g}")

    source_entropy = entropy(source.pmf)
    solution = RdpSolution(
        rate=rate,
        kernel_matrix=kernel_matrix.tolist(),
        achieved_distortion=achieved,
        marginal_gap=gap,
        delta=float(delta),
        min_distortion=min_distortion,
        multiplier=multiplier,
        source_entropy=source_entropy,
        theorem1_hypothesis_holds=rate < source_entropy,
    )
    logger.info(f"R({delta:.6g}) = {rate:.6f} bits (E d = {achieved:.6g}, marginal gap {gap:.2g})")
    return solution


def _blahut_arimoto(source: FiniteSource, d: DistortionMatrix, slope: float,
                    log_q: Optional[np.ndarray] = None) -> Tuple[float, float, np.ndarray]:
    """One Blahut-Arimoto run at a fixed slope; returns (rate bits, distortion, log q)."""
    log_p = np.log(source.pmf)
    scaled = -slope * d.d
    if log_q is None:
        log_q = np.full(d.d.shape[1], -np.log(d.d.shape[1]))
    for _ in range(BA_MAX_ITERATIONS):
        log_conditional = scaled + log_q
        log_conditional -= logsumexp(log_conditional, axis=1, keepdims=True)
        new_log_q = logsumexp(log_p[:, None] + log_conditional, axis=0)
        converged = np.abs(np.exp(new_log_q) - np.exp(log_q)).max() < BA_TOLERANCE
        log_q = new_log_q
        if converged:
            break
    conditional = np.exp(log_conditional)
    rate = float(np.sum(source.pmf[:, None] * conditional * (log_conditional - log_q))) / np.log(2)
    distortion = float(np.sum(source.pmf[:, None] * conditional * d.d))
    return max(rate, 0.0), distortion, log_q


def rate_distortion_function(source: FiniteSource, d: DistortionMatrix, delta: float) -> float:
    """
    Classical R(delta) without the output-marginal constraint.

    Blahut-Arimoto at a slope found by bisection on the distortion.
    """
    _check_inputs(source, d, delta)
    floor = float(np.sum(source.pmf * d.d.min(axis=1)))
    ceiling = float(np.min(source.pmf @ d.d))
    if delta < floor - DISTORTION_TOLERANCE:
        raise InfeasibleDistortionError(delta, floor)
    if delta >= ceiling:
        return 0.0

    scale = max(d.max, 1e-300)
    low, high = 0.0, 1.0 / scale
    rate, distortion, log_q = _blahut_arimoto(source, d, high)
    while distortion > delta and high * scale < MAX_MULTIPLIER:
        low, high = high, 2.0 * high
        rate, distortion, log_q = _blahut_arimoto(source, d, high, log_q)
    if distortion > delta:
        return rate

    feasible_rate = rate
    for _ in range(BISECTION_STEPS):
        middle = 0.5 * (low + high)
        rate, distortion, log_q = _blahut_arimoto(source, d, middle, log_q)
        if distortion > delta:
            low = middle
        else:
            high, feasible_rate = middle, rate
        if high - low <= 1e-12 * high:
            break
    return feasible_rate
