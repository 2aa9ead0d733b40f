from typing import List, Tuple

import numpy as np

# Tolerance on probability sums.
SUM_TOLERANCE = 1e-12


class Validator:
    """Utility class for validating the numeric inputs of the toolkit."""

    @staticmethod
    def validate_pmf(pmf: np.ndarray, strictly_positive: bool = False) -> Tuple[bool, List[str]]:
        """
        Validate a probability vector.

        Args:
            pmf: Candidate probability vector
            strictly_positive: Whether zero entries are rejected

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if pmf.ndim != 1:
            errors.append(f"pmf must be one-dimensional, got shape {pmf.shape}")
            return False, errors
        if not np.all(np.isfinite(pmf)):
            errors.append("pmf has non-finite entries")
            return False, errors

        if strictly_positive and np.any(pmf <= 0):
            errors.append("pmf entries must be strictly positive")
        elif np.any(pmf < 0):
            errors.append("pmf entries must be non-negative")

        total = float(np.sum(pmf))
        if abs(total - 1.0) > SUM_TOLERANCE:
            errors.append(f"pmf sums to {total!r}, expected 1 within {SUM_TOLERANCE}")

        return len(errors) == 0, errors

    @staticmethod
    def validate_sub_pmf(values: np.ndarray) -> Tuple[bool, List[str]]:
        """
        Validate a sub-probability vector (non-negative, total mass at most one).

        Args:
            values: Candidate sub-probability vector

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if not np.all(np.isfinite(values)):
            errors.append("sub-pmf has non-finite entries")
            return False, errors
        if np.any(values < 0):
            errors.append("sub-pmf entries must be non-negative")
        total = float(np.sum(values))
        if total > 1.0 + SUM_TOLERANCE:
            errors.append(f"sub-pmf has total mass {total!r} > 1")
        return len(errors) == 0, errors

    @staticmethod
    def validate_kernel(matrix: np.ndarray) -> Tuple[bool, List[str]]:
        """
        Validate a row-stochastic square matrix.

        Args:
            matrix: Candidate conditional distribution p(y|x), rows indexed by x

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            errors.append(f"kernel must be a square matrix, got shape {matrix.shape}")
            return False, errors
        if not np.all(np.isfinite(matrix)):
            errors.append("kernel has non-finite entries")
            return False, errors
        if np.any(matrix < 0):
            errors.append("kernel entries must be non-negative")

        row_sums = matrix.sum(axis=1)
        bad_rows = np.flatnonzero(np.abs(row_sums - 1.0) > SUM_TOLERANCE)
        for row in bad_rows:
            errors.append(f"kernel row {row} sums to {row_sums[row]!r}")

        return len(errors) == 0, errors

    @staticmethod
    def validate_distortion(matrix: np.ndarray) -> Tuple[bool, List[str]]:
        """
        Validate a distortion matrix.

        Args:
            matrix: Candidate k x k matrix of d(x, y)

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            errors.append(f"distortion must be a square matrix, got shape {matrix.shape}")
            return False, errors
        if not np.all(np.isfinite(matrix)):
            errors.append("distortion has non-finite entries")
        elif np.any(matrix < 0):
            errors.append("distortion entries must be non-negative")
        return len(errors) == 0, errors

    @staticmethod
    def validate_symbols(symbols: np.ndarray, alphabet_size: int) -> Tuple[bool, List[str]]:
        """
        Validate symbol indices against an alphabet.

        Args:
            symbols: Integer array of symbol indices
            alphabet_size: Alphabet size k

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if symbols.size == 0:
            errors.append("blocks must contain at least one symbol")
            return False, errors
        if np.any(symbols < 0) or np.any(symbols >= alphabet_size):
            errors.append(f"symbols must lie in [0, {alphabet_size})")
        return len(errors) == 0, errors
