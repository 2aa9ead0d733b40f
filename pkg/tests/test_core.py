import pytest
import sys
from pathlib import Path

import numpy as np

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.core import (
    BoundViolationError,
    DistortionMatrix,
    FiniteSource,
    InputValidationError,
    JointPmf,
    Kernel,
    additive_distortion,
    all_blocks,
    as_batch,
    as_block,
    batch_tvd_bound_check,
    binary_entropy,
    block_range,
    block_to_index,
    empirical_block_distribution,
    format_block,
    index_to_block,
    marginal_tvd,
    mean_and_half_width,
    mutual_information,
    product_pmf,
    shared_channel_tvd,
    tvd,
)
from src.utils import Validator


def random_pmf(rng, k):
    values = rng.random(k) + 0.05
    return values / values.sum()


class TestTypes:
    """Tests for the value types."""

    def test_source_rejects_zero_entries(self):
        with pytest.raises(InputValidationError):
            FiniteSource([1.0, 0.0])

    def test_source_rejects_bad_sum(self):
        with pytest.raises(InputValidationError):
            FiniteSource([0.5, 0.6])

    def test_source_needs_two_symbols(self):
        with pytest.raises(InputValidationError):
            FiniteSource([1.0])

    def test_source_is_immutable(self):
        source = FiniteSource.uniform(2)
        with pytest.raises(ValueError):
            source.pmf[0] = 0.9

    def test_bernoulli(self):
        source = FiniteSource.bernoulli(0.3)
        assert source.pmf.tolist() == pytest.approx([0.7, 0.3])
        assert source.min_probability == pytest.approx(0.3)

    def test_kernel_rows_must_sum_to_one(self):
        with pytest.raises(InputValidationError):
            Kernel([[0.9, 0.2], [0.0, 1.0]])

    def test_symmetric_kernel(self):
        kernel = Kernel.symmetric(3, 0.3)
        assert kernel.matrix[0].tolist() == pytest.approx([0.7, 0.15, 0.15])
        assert kernel.induced_output(FiniteSource.uniform(3)) == pytest.approx(np.full(3, 1 / 3))

    def test_identity_and_independent_kernels(self):
        source = FiniteSource([0.2, 0.3, 0.5])
        assert Kernel.identity(3).induced_output(source) == pytest.approx(source.pmf)
        joint = JointPmf.from_kernel(source, Kernel.independent(source))
        assert mutual_information(joint) == pytest.approx(0.0, abs=1e-12)

    def test_distortion_rejects_negative(self):
        with pytest.raises(InputValidationError):
            DistortionMatrix([[0.0, -1.0], [1.0, 0.0]])

    def test_joint_marginals(self):
        joint = JointPmf.from_kernel(FiniteSource([0.8, 0.2]), Kernel.symmetric(2, 0.1))
        assert joint.marginal_x == pytest.approx([0.8, 0.2])
        assert joint.marginal_y == pytest.approx([0.74, 0.26])


class TestProbability:
    """Tests for the exact probability utilities."""

    def test_tvd_examples(self):
        assert tvd([0.5, 0.5], [0.5, 0.5]) == 0.0
        assert tvd([1.0, 0.0], [0.0, 1.0]) == 1.0
        assert tvd([0.5, 0.5], [0.8, 0.2]) == pytest.approx(0.3)

    def test_tvd_shape_mismatch(self):
        with pytest.raises(InputValidationError):
            tvd([0.5, 0.5], [0.2, 0.3, 0.5])

    def test_tvd_is_a_metric(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            k = int(rng.integers(2, 5))
            p, q, r = (random_pmf(rng, k) for _ in range(3))
            assert tvd(p, q) == pytest.approx(tvd(q, p), abs=1e-12)
            assert tvd(p, r) <= tvd(p, q) + tvd(q, r) + 1e-12
            assert tvd(p, p) == 0.0

    def test_batch_tvd_examples(self):
        assert batch_tvd_bound_check([0.3, 0.7], [0.3, 0.7], 3) == (0.0, 0.0)
        exact, bound = batch_tvd_bound_check([1.0, 0.0], [0.0, 1.0], 2)
        assert exact == pytest.approx(1.0)
        assert bound == pytest.approx(2.0)
        exact, bound = batch_tvd_bound_check([0.5, 0.5], [0.8, 0.2], 2)
        assert bound == pytest.approx(0.6)
        assert exact <= bound
        assert exact == pytest.approx(tvd(np.kron([0.5, 0.5], [0.5, 0.5]), np.kron([0.8, 0.2], [0.8, 0.2])))

    def test_batch_tvd_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            k = int(rng.choice([2, 3]))
            batch_size = int(rng.integers(1, 5))
            exact, bound = batch_tvd_bound_check(random_pmf(rng, k), random_pmf(rng, k), batch_size)
            assert exact <= bound + 1e-12

    def test_batch_tvd_rejects_large_product(self):
        with pytest.raises(InputValidationError):
            batch_tvd_bound_check([0.25] * 4, [0.25] * 4, 4)

    def test_mutual_information_examples(self):
        assert mutual_information(JointPmf.product([0.3, 0.7], [0.6, 0.4])) == pytest.approx(0.0, abs=1e-12)
        assert mutual_information(JointPmf(np.diag([0.5, 0.5]))) == pytest.approx(1.0)
        bsc = JointPmf.from_kernel(FiniteSource.uniform(2), Kernel.symmetric(2, 0.1))
        assert mutual_information(bsc) == pytest.approx(1 - binary_entropy(0.1))
        assert mutual_information(bsc) == pytest.approx(0.5310, abs=1e-4)

    def test_product_pmf_order(self):
        product = product_pmf([0.8, 0.2], 2)
        assert product.tolist() == pytest.approx([0.64, 0.16, 0.16, 0.04])

    def test_shared_channel_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p, q = random_pmf(rng, 3), random_pmf(rng, 3)
            kernel = Kernel(np.vstack([random_pmf(rng, 3) for _ in range(3)]))
            joint_gap, input_gap, output_gap = shared_channel_tvd(p, q, kernel)
            assert joint_gap == pytest.approx(input_gap, abs=1e-12)
            assert output_gap <= input_gap + 1e-12

    def test_marginal_tvd_never_exceeds_joint(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = JointPmf(random_pmf(rng, 9).reshape(3, 3))
            b = JointPmf(random_pmf(rng, 9).reshape(3, 3))
            joint_gap, marginal_gap = marginal_tvd(a, b)
            assert marginal_gap <= joint_gap + 1e-12

    def test_bounded_function_gap(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            k = int(rng.integers(2, 10))
            p, q = random_pmf(rng, k), random_pmf(rng, k)
            f = rng.uniform(-1.0, 1.0, size=k)
            assert abs(p @ f - q @ f) <= 2 * np.abs(f).max() * tvd(p, q) + 1e-12

    def test_mean_and_half_width(self):
        assert mean_and_half_width([2.0]) == (2.0, 0.0)
        mean, half_width = mean_and_half_width([0.0, 1.0, 0.0, 1.0])
        assert mean == pytest.approx(0.5)
        assert half_width == pytest.approx(3.0 * np.std([0, 1, 0, 1], ddof=1) / 2.0)
        with pytest.raises(InputValidationError):
            mean_and_half_width([])


class TestBlocks:
    """Tests for block parsing, indexing and batch statistics."""

    def test_block_parsing(self):
        block = as_block("0120", 3)
        assert block.tolist() == [0, 1, 2, 0]
        assert format_block(block) == "0120"

    def test_block_rejects_out_of_alphabet(self):
        with pytest.raises(InputValidationError):
            as_block("012", 2)

    def test_batch_rejects_ragged(self):
        with pytest.raises(InputValidationError):
            as_batch(["01", "011"], 2)

    def test_indexing(self):
        assert block_to_index(np.array([1, 0, 1]), 2) == 5
        assert index_to_block(5, 2, 3).tolist() == [1, 0, 1]
        assert all_blocks(2, 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
        assert block_range(3, 2, 3, 5).tolist() == [[1, 0], [1, 1]]

    def test_additive_distortion_examples(self):
        hamming = DistortionMatrix.hamming(2)
        batch = as_batch(["00", "11"], 2)
        assert additive_distortion(batch, batch, hamming) == 0.0
        assert additive_distortion(as_block("01", 2), as_block("00", 2), hamming) == pytest.approx(0.5)
        assert additive_distortion(batch, as_batch(["01", "11"], 2), hamming) == pytest.approx(0.25)

    def test_additive_distortion_shape_mismatch(self):
        with pytest.raises(InputValidationError):
            additive_distortion(as_batch(["00"], 2), as_batch(["00", "11"], 2), DistortionMatrix.hamming(2))

    def test_empirical_block_distribution_examples(self):
        point = empirical_block_distribution(as_batch(["10", "10", "10"], 2), 2)
        assert point.tolist() == [0.0, 0.0, 1.0, 0.0]
        uniform = empirical_block_distribution(as_batch(["00", "01", "10", "11"], 2), 2)
        assert uniform.tolist() == [0.25] * 4
        counted = empirical_block_distribution(as_batch(["00", "00", "01", "11"], 2), 2)
        assert counted.tolist() == [0.5, 0.25, 0.0, 0.25]

    def test_empirical_block_distribution_table_limit(self):
        with pytest.raises(InputValidationError):
            empirical_block_distribution(np.zeros((1, 21), dtype=np.int64), 2)


class TestValidator:
    """Tests for Validator."""

    def test_validate_pmf(self):
        is_valid, errors = Validator.validate_pmf(np.array([0.5, 0.5]))
        assert is_valid
        assert errors == []
        is_valid, errors = Validator.validate_pmf(np.array([0.5, 0.4]))
        assert not is_valid
        assert len(errors) == 1

    def test_validate_sub_pmf(self):
        assert Validator.validate_sub_pmf(np.array([0.2, 0.3]))[0]
        assert not Validator.validate_sub_pmf(np.array([0.8, 0.3]))[0]


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
