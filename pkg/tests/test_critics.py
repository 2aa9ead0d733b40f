import pytest
import sys
import itertools
import math
from pathlib import Path

import numpy as np

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.core import FiniteSource, InputValidationError, UnsupportedLengthError, as_block
from src.critics import (
    Lz78Coder,
    RawCoder,
    check_validity,
    elias_gamma_decode,
    elias_gamma_encode,
    exhaustive_moments,
    get_coder,
    kraft_sum,
    longest_run,
    longest_run_moments,
    make_compressor_critic,
    make_constant_critic,
    make_empirical_tvd_critic,
    make_frequency_critic,
    make_llr_critic,
    make_mixture_critic,
    make_run_critic,
    positive_part_stats,
    validity_from_moments,
)

UNIFORM_BINARY = FiniteSource.uniform(2)
TERNARY = FiniteSource([0.2, 0.3, 0.5])


def binary_critics():
    """Every built-in critic kind declared against the uniform binary source."""
    return [
        make_llr_critic(UNIFORM_BINARY, [0.9, 0.1]),
        make_frequency_critic(UNIFORM_BINARY, 1),
        make_run_critic(0.5, 16),
        make_compressor_critic(UNIFORM_BINARY, 'raw'),
        make_compressor_critic(UNIFORM_BINARY, 'lz78'),
        make_empirical_tvd_critic(UNIFORM_BINARY),
        make_mixture_critic([
            (make_frequency_critic(UNIFORM_BINARY, 0), 0.5),
            (make_compressor_critic(UNIFORM_BINARY, 'lz78'), 0.5),
        ]),
    ]


def ternary_critics():
    return [
        make_llr_critic(TERNARY, [0.5, 0.3, 0.2]),
        make_frequency_critic(TERNARY, 2),
        make_compressor_critic(TERNARY, 'raw'),
        make_compressor_critic(TERNARY, 'lz78'),
        make_empirical_tvd_critic(TERNARY),
        make_mixture_critic([
            (make_frequency_critic(TERNARY, 0), 0.25),
            (make_compressor_critic(TERNARY, 'raw'), 0.75),
        ]),
    ]


class TestLikelihoodRatioCritic:
    """Tests for the likelihood-ratio critic."""

    def test_equal_distributions_score_zero(self):
        critic = make_llr_critic(TERNARY, TERNARY.pmf)
        assert critic("0122") == pytest.approx(0.0, abs=1e-12)

    def test_single_letter_scores(self):
        critic = make_llr_critic(UNIFORM_BINARY, [0.9, 0.1])
        assert critic("1") == pytest.approx(math.log2(0.1 / 0.5))
        assert critic("1") == pytest.approx(-2.3219, abs=1e-4)
        assert critic("00") == pytest.approx(2 * math.log2(0.9 / 0.5))
        assert critic("00") == pytest.approx(1.6960, abs=1e-4)

    def test_zero_likelihood_is_floored(self):
        critic = make_llr_critic(UNIFORM_BINARY, [1.0, 0.0])
        assert critic("01") == -1024.0

    def test_length_tables(self):
        q2 = [0.4, 0.1, 0.1, 0.4]
        critic = make_llr_critic(UNIFORM_BINARY, {2: q2})
        assert critic("00") == pytest.approx(math.log2(0.4 / 0.25))
        assert not critic.supports_length(3)
        with pytest.raises(UnsupportedLengthError):
            critic("000")

    def test_rejects_super_probability(self):
        with pytest.raises(InputValidationError):
            make_llr_critic(UNIFORM_BINARY, [0.9, 0.2])


class TestFrequencyCritic:
    """Tests for the frequency critic."""

    def test_exact_frequency_branch(self):
        critic = make_frequency_critic(UNIFORM_BINARY, 1)
        assert critic.level(as_block("0011", 2)) == 0.0
        assert critic("0011") == pytest.approx(-2 * math.log2(3))
        assert critic("0011") == pytest.approx(-3.1699, abs=1e-4)

    def test_small_deviation(self):
        critic = make_frequency_critic(UNIFORM_BINARY, 1)
        assert critic.level(as_block("1111", 2)) == 0.0
        assert critic("1111") == pytest.approx(-3.1699, abs=1e-4)

    def test_all_ones_length_16(self):
        critic = make_frequency_critic(UNIFORM_BINARY, 1)
        assert critic.level(as_block("1" * 16, 2)) == 1.0
        assert critic("1" * 16) == pytest.approx(-3.0)

    def test_score_many_matches_score(self):
        critic = make_frequency_critic(TERNARY, 2)
        blocks = np.random.default_rng(0).integers(3, size=(50, 12))
        expected = [critic.score(block) for block in blocks]
        assert critic.score_many(blocks) == pytest.approx(expected)

    def test_batch_is_scored_as_concatenation(self):
        critic = make_frequency_critic(UNIFORM_BINARY, 1)
        batch = np.array([[1] * 8, [1] * 8])
        assert critic.score_batch(batch) == pytest.approx(critic("1" * 16))
        assert critic.score_batch(batch) == pytest.approx(-3.0)

    def test_rejects_symbol_outside_alphabet(self):
        with pytest.raises(InputValidationError):
            make_frequency_critic(UNIFORM_BINARY, 2)


class TestRunCritic:
    """Tests for the longest-run critic."""

    def test_longest_run(self):
        assert longest_run(as_block("0110", 2)) == 2
        assert longest_run(as_block("1111", 2)) == 4
        assert longest_run(as_block("0000", 2)) == 0

    def test_moments_match_enumeration(self):
        means, variances = longest_run_moments(0.5, 10)
        for n in range(1, 11):
            runs = np.array([longest_run(np.array(bits)) for bits in itertools.product([0, 1], repeat=n)])
            assert means[n] == pytest.approx(runs.mean(), abs=1e-12)
            assert variances[n] == pytest.approx(runs.var(), abs=1e-12)

    def test_moments_biased_source(self):
        q = 0.3
        means, variances = longest_run_moments(q, 8)
        blocks = list(itertools.product([0, 1], repeat=8))
        probabilities = np.array([q ** sum(b) * (1 - q) ** (8 - sum(b)) for b in blocks])
        runs = np.array([longest_run(np.array(b)) for b in blocks])
        mean = float(np.sum(probabilities * runs))
        assert means[8] == pytest.approx(mean, abs=1e-12)
        assert variances[8] == pytest.approx(float(np.sum(probabilities * runs ** 2)) - mean ** 2, abs=1e-12)

    def test_normalizer_and_score_at_length_4(self):
        runs = np.array([longest_run(np.array(bits)) for bits in itertools.product([0, 1], repeat=4)])
        a4 = math.log2(1 + runs.std() + abs(runs.mean() - 2))
        critic = make_run_critic(0.5, 16)
        assert critic.normalizer(4) == pytest.approx(a4)
        assert critic("1111") == pytest.approx(math.log2(3) - a4)

    def test_length_limit(self):
        critic = make_run_critic(0.5, 16)
        assert not critic.supports_length(17)
        with pytest.raises(UnsupportedLengthError):
            critic("0" * 17)

    def test_rejects_q_above_half(self):
        with pytest.raises(InputValidationError):
            make_run_critic(0.6, 16)


class TestCompressorCritic:
    """Tests for the prefix-free coders and the compressor critic."""

    def test_elias_gamma(self):
        assert elias_gamma_encode(1) == "1"
        assert elias_gamma_encode(4) == "00100"
        assert elias_gamma_decode("00100") == (4, 5)
        with pytest.raises(InputValidationError):
            elias_gamma_encode(0)

    def test_raw_coder_score(self):
        critic = make_compressor_critic(UNIFORM_BINARY, 'raw')
        assert RawCoder().code_length(as_block("0110", 2), 2) == 9
        assert critic("0110") == pytest.approx(-5.0)

    def test_lz78_decodes_its_encoding(self):
        coder = Lz78Coder()
        for text in ["0", "0000", "0101010101010101", "2101120", "00000000000"]:
            block = as_block(text, 3)
            bits = coder.encode(block, 3)
            assert len(bits) == coder.code_length(block, 3)
            assert coder.decode(bits, 3).tolist() == block.tolist()

    def test_lz78_prefers_periodic_string(self):
        critic = make_compressor_critic(UNIFORM_BINARY, 'lz78')
        periodic = critic("0101010101010101")
        irregular = critic("0100011011000001")
        assert periodic == pytest.approx(16 - 39)
        assert irregular == pytest.approx(16 - 41)
        assert periodic > irregular

    @pytest.mark.parametrize("coder_id", ["raw", "lz78"])
    def test_kraft_inequality(self, coder_id):
        coder = get_coder(coder_id)
        total = 0.0
        for n in range(1, 11):
            partial = kraft_sum(coder, 2, n)
            assert partial <= 1.0
            total += partial
        assert total <= 1.0
        for n in range(1, 6):
            assert kraft_sum(coder, 3, n) <= 1.0

    def test_unknown_coder(self):
        with pytest.raises(InputValidationError):
            make_compressor_critic(UNIFORM_BINARY, 'gzip')


class TestEmpiricalTvdCritic:
    """Tests for the empirical total-variation critic."""

    def test_scale_and_raw_scores(self):
        critic = make_empirical_tvd_critic(UNIFORM_BINARY)
        assert critic.scales[1] == 2
        assert critic.index_for(4) == 1
        assert critic.raw_score(as_block("0011", 2)) == 0
        assert critic.raw_score(as_block("0000", 2)) == 1

    def test_matching_distribution_scores_zero_raw(self):
        critic = make_empirical_tvd_critic(UNIFORM_BINARY)
        assert critic.max_index == 2
        # 16 blocks of length 2, each of the four blocks four times
        text = "00011011" * 4
        assert critic.index_for(len(text)) == 2
        assert critic.raw_score(as_block(text, 2)) == 0
        assert critic.raw_score(as_block("00" * 16, 2)) > 0

    def test_offset_fits_every_index(self):
        critic = make_empirical_tvd_critic(UNIFORM_BINARY)
        assert critic.metadata['L'] == critic.offset
        for n in range(critic.max_index + 1):
            assert critic.index_sum(n) <= 1.0 + 1e-9

    def test_length_limit(self):
        critic = make_empirical_tvd_critic(UNIFORM_BINARY, max_index=1)
        assert critic.max_supported_length == 31
        with pytest.raises(UnsupportedLengthError):
            critic.index_for(32)


class TestMixtureCritic:
    """Tests for finite mixtures of critics."""

    def test_identical_components(self):
        component = make_frequency_critic(UNIFORM_BINARY, 1)
        mixture = make_mixture_critic([(component, 0.5), (component, 0.5)])
        assert mixture("0001111111") == pytest.approx(component("0001111111"))

    def test_constant_components(self):
        mixture = make_mixture_critic([
            (make_constant_critic(UNIFORM_BINARY, 0.0), 0.5),
            (make_constant_critic(UNIFORM_BINARY, 1.0), 0.5),
        ])
        assert mixture("0110") == pytest.approx(math.log2(1.5))
        assert mixture("0110") == pytest.approx(0.585, abs=1e-3)

    def test_dominates_each_component(self):
        second = make_compressor_critic(UNIFORM_BINARY, 'lz78')
        mixture = make_mixture_critic([(make_frequency_critic(UNIFORM_BINARY, 1), 0.5), (second, 0.5)])
        blocks = np.random.default_rng(1).integers(2, size=(100, 12))
        assert np.all(mixture.score_many(blocks) >= second.score_many(blocks) - 1.0 - 1e-12)

    def test_rejects_bad_weights(self):
        component = make_frequency_critic(UNIFORM_BINARY, 1)
        with pytest.raises(InputValidationError):
            make_mixture_critic([(component, 0.7), (component, 0.7)])
        with pytest.raises(InputValidationError):
            make_mixture_critic([(component, 0.0)])

    def test_rejects_mixed_sources(self):
        with pytest.raises(InputValidationError):
            make_mixture_critic([
                (make_frequency_critic(UNIFORM_BINARY, 1), 0.5),
                (make_frequency_critic(FiniteSource([0.3, 0.7]), 1), 0.5),
            ])


class TestValidity:
    """Tests for the validity checks and positive-part moments."""

    def test_llr_with_q_equal_p(self):
        critic = make_llr_critic(TERNARY, TERNARY.pmf)
        report = check_validity(critic, 4)
        assert report.sum == pytest.approx(1.0, abs=1e-12)
        assert report.passed

    def test_constant_one_fails(self):
        report = check_validity(make_constant_critic(UNIFORM_BINARY, 1.0), 3)
        assert report.sum == pytest.approx(2.0)
        assert not report.passed
        assert report.model_dump(by_alias=True)['pass'] is False

    def test_frequency_length_8(self):
        report = check_validity(make_frequency_critic(UNIFORM_BINARY, 1), 8)
        assert report.sum <= 1.0
        assert report.passed

    def test_montecarlo_mode(self):
        report = check_validity(make_llr_critic(UNIFORM_BINARY, [0.5, 0.5]), 12, mode='montecarlo',
                                trials=1000, seed=4)
        assert report.sum == pytest.approx(1.0)
        assert report.half_width == 0.0
        assert report.passed

    def test_exhaustive_limit(self):
        with pytest.raises(InputValidationError):
            check_validity(make_frequency_critic(UNIFORM_BINARY, 1), 23)

    def test_unknown_mode(self):
        with pytest.raises(InputValidationError):
            check_validity(make_frequency_critic(UNIFORM_BINARY, 1), 2, mode='sampling')

    def test_positive_part_examples(self):
        assert positive_part_stats(make_constant_critic(UNIFORM_BINARY, 0.0), 5) == pytest.approx((1.0, 0.0, 0.0))
        assert positive_part_stats(make_llr_critic(TERNARY, TERNARY.pmf), 3) == pytest.approx((1.0, 0.0, 0.0),
                                                                                               abs=1e-12)
        exp_positive, mean_positive, max_positive = positive_part_stats(make_frequency_critic(UNIFORM_BINARY, 1), 8)
        assert exp_positive <= 2.0
        assert mean_positive <= 1.0
        assert max_positive <= 16.0

    def test_binary_critics_valid_up_to_length_10(self):
        for critic in binary_critics():
            for n in range(1, 11):
                moments = exhaustive_moments(critic, n)
                assert moments.sum <= 1.0 + 1e-9, f"{critic.kind} at n={n}"
                assert moments.exp_positive <= 2.0 + 1e-9
                assert moments.mean_positive <= 1.0 + 1e-9
                assert moments.max_positive <= moments.max_bound + 1e-9

    def test_ternary_critics_valid_up_to_length_6(self):
        for critic in ternary_critics():
            for n in range(1, 7):
                moments = exhaustive_moments(critic, n)
                assert moments.sum <= 1.0 + 1e-9, f"{critic.kind} at n={n}"
                assert moments.exp_positive <= 2.0 + 1e-9
                assert moments.mean_positive <= 1.0 + 1e-9
                assert moments.max_positive <= moments.max_bound + 1e-9

    def test_mean_score_is_never_positive(self):
        for critics, lengths in ((binary_critics(), range(1, 11)), (ternary_critics(), range(1, 7))):
            for critic in critics:
                for n in lengths:
                    assert exhaustive_moments(critic, n).mean_score <= 1e-9, f"{critic.kind} at n={n}"

    def test_report_from_moments_matches_check(self):
        critic = make_frequency_critic(UNIFORM_BINARY, 1)
        moments = exhaustive_moments(critic, 6)
        assert validity_from_moments(critic, moments) == check_validity(critic, 6)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
