from typing import Any, Dict, Sequence, Union

import numpy as np

from .errors import InputValidationError
from ..utils.validator import SUM_TOLERANCE, Validator

ArrayLike = Union[Sequence[float], np.ndarray]


def _frozen_array(values: Any, ndim: int, name: str) -> np.ndarray:
    try:
        array = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise InputValidationError(f"{name} is not numeric: {e}") from e
    if array.ndim != ndim:
        raise InputValidationError(f"{name} must have {ndim} dimension(s), got shape {array.shape}")
    array.setflags(write=False)
    return array


def _raise_on(result, name: str):
    is_valid, errors = result
    if not is_valid:
        raise InputValidationError(f"Invalid {name}: " + "; ".join(errors))


class FiniteSource:
    """A finite alphabet {0, ..., k-1} with a strictly positive pmf."""

    def __init__(self, pmf: ArrayLike):
        """
        Initialize the source.

        Args:
            pmf: Probability of each symbol; every entry must be positive
        """
        self.pmf = _frozen_array(pmf, 1, "source pmf")
        _raise_on(Validator.validate_pmf(self.pmf, strictly_positive=True), "source pmf")
        if self.pmf.shape[0] < 2:
            raise InputValidationError("source alphabet must have at least two symbols")

    @classmethod
    def uniform(cls, alphabet_size: int) -> "FiniteSource":
        return cls(np.full(alphabet_size, 1.0 / alphabet_size))

    @classmethod
    def bernoulli(cls, q: float) -> "FiniteSource":
        """Binary source with P(1) = q."""
        return cls([1.0 - q, q])

    @property
    def alphabet_size(self) -> int:
        return int(self.pmf.shape[0])

    @property
    def min_probability(self) -> float:
        return float(self.pmf.min())

    def to_dict(self) -> Dict[str, Any]:
        return {'alphabet_size': self.alphabet_size, 'pmf': self.pmf.tolist()}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteSource) and np.array_equal(self.pmf, other.pmf)

    def __hash__(self) -> int:
        return hash(self.pmf.tobytes())

    def __repr__(self) -> str:
        return f"FiniteSource(pmf={self.pmf.tolist()})"


class Kernel:
    """A conditional distribution p(y|x) stored as a row-stochastic k x k matrix."""

    def __init__(self, matrix: ArrayLike):
        self.matrix = _frozen_array(matrix, 2, "kernel")
        _raise_on(Validator.validate_kernel(self.matrix), "kernel")

    @classmethod
    def identity(cls, alphabet_size: int) -> "Kernel":
        return cls(np.eye(alphabet_size))

    @classmethod
    def independent(cls, source: FiniteSource) -> "Kernel":
        """Kernel whose output ignores the input and follows the source pmf."""
        return cls(np.tile(source.pmf, (source.alphabet_size, 1)))

    @classmethod
    def symmetric(cls, alphabet_size: int, crossover: float) -> "Kernel":
        """
        Symmetric channel: keep the symbol with probability 1 - crossover,
        otherwise move uniformly to one of the other symbols.
        """
        if not 0.0 <= crossover <= 1.0:
            raise InputValidationError(f"crossover must lie in [0, 1], got {crossover}")
        off = crossover / (alphabet_size - 1)
        matrix = np.full((alphabet_size, alphabet_size), off)
        np.fill_diagonal(matrix, 1.0 - crossover)
        return cls(matrix)

    @property
    def alphabet_size(self) -> int:
        return int(self.matrix.shape[0])

    def induced_output(self, source: FiniteSource) -> np.ndarray:
        """Output marginal p_Y = p_X K."""
        return source.pmf @ self.matrix

    def to_dict(self) -> Dict[str, Any]:
        return {'matrix': self.matrix.tolist()}

    def __repr__(self) -> str:
        return f"Kernel(matrix={self.matrix.tolist()})"


class DistortionMatrix:
    """Single-letter distortion d(x, y) >= 0."""

    def __init__(self, matrix: ArrayLike):
        self.d = _frozen_array(matrix, 2, "distortion")
        _raise_on(Validator.validate_distortion(self.d), "distortion")

    @classmethod
    def hamming(cls, alphabet_size: int) -> "DistortionMatrix":
        return cls(1.0 - np.eye(alphabet_size))

    @property
    def alphabet_size(self) -> int:
        return int(self.d.shape[0])

    @property
    def max(self) -> float:
        return float(self.d.max())

    def expected(self, joint: "JointPmf") -> float:
        """E d(X, Y) under a joint pmf."""
        return float(np.sum(joint.matrix * self.d))

    def to_dict(self) -> Dict[str, Any]:
        return {'matrix': self.d.tolist()}


class JointPmf:
    """Joint pmf p(x, y) on a k x k grid."""

    def __init__(self, matrix: ArrayLike):
        self.matrix = _frozen_array(matrix, 2, "joint pmf")
        is_valid, errors = Validator.validate_pmf(self.matrix.ravel())
        if not is_valid:
            raise InputValidationError("Invalid joint pmf: " + "; ".join(errors))

    @classmethod
    def from_kernel(cls, source: FiniteSource, kernel: Kernel) -> "JointPmf":
        if source.alphabet_size != kernel.alphabet_size:
            raise InputValidationError(
                f"source has {source.alphabet_size} symbols, kernel has {kernel.alphabet_size}"
            )
        return cls(source.pmf[:, None] * kernel.matrix)

    @classmethod
    def product(cls, p_x: ArrayLike, p_y: ArrayLike) -> "JointPmf":
        return cls(np.outer(np.asarray(p_x, dtype=float), np.asarray(p_y, dtype=float)))

    @property
    def alphabet_size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def marginal_x(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def marginal_y(self) -> np.ndarray:
        return self.matrix.sum(axis=0)


def marginals_match(p: np.ndarray, q: np.ndarray, tolerance: float = SUM_TOLERANCE) -> bool:
    return bool(np.max(np.abs(np.asarray(p) - np.asarray(q))) <= tolerance)
