import pytest
import sys
from pathlib import Path

import numpy as np

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.codec import OneShotCode, sample_codebook
from src.core import (
    DistortionMatrix,
    FiniteSource,
    InputValidationError,
    JointPmf,
    Kernel,
    ResourceLimitError,
    mutual_information,
    product_pmf,
)
from src.critics import ConstantCritic, FrequencyCritic, make_llr_critic
from src.experiments import (
    SeriesReport,
    a_set_hoeffding_bound,
    a_set_mass,
    cap_for_length,
    claim2_empirical,
    derandomization_gap,
    derive_seed,
    estimation_experiment,
    frequency_sensitivity_experiment,
    lemma1_bound_check,
    lemma1_grid,
    resolve_workers,
    run_separation_experiment,
    run_trials,
    sample_run_capped,
    simulate_batch,
    soft_covering_gap,
    theorem2_certificate,
)

UNIFORM_BINARY = FiniteSource.uniform(2)
HAMMING = DistortionMatrix.hamming(2)


def longest_equal_run(row):
    longest = current = 1
    for previous, symbol in zip(row, row[1:]):
        current = current + 1 if symbol == previous else 1
        longest = max(longest, current)
    return longest


class TestRunner:
    """Tests for the chunked Monte Carlo harness."""

    def test_worker_count_does_not_change_results(self):
        def chunk(rng, count):
            return rng.random(count)

        single = run_trials(chunk, 2500, seed=17, chunk_size=300, workers=1)
        threaded = run_trials(chunk, 2500, seed=17, chunk_size=300, workers=4)
        assert single.shape == (2500,)
        assert np.array_equal(single, threaded)

    def test_seed_changes_results(self):
        def chunk(rng, count):
            return rng.random(count)

        assert not np.array_equal(run_trials(chunk, 10, seed=1, workers=1), run_trials(chunk, 10, seed=2, workers=1))

    def test_rejects_bad_counts(self):
        with pytest.raises(InputValidationError):
            run_trials(lambda rng, count: rng.random(count), 0, seed=0, workers=1)
        with pytest.raises(InputValidationError):
            run_trials(lambda rng, count: rng.random(count), 5, seed=0, chunk_size=0, workers=1)

    def test_resolve_workers_reads_environment(self, monkeypatch):
        monkeypatch.setenv('ALGREALISM_THREADS', '3')
        assert resolve_workers() == 3
        assert resolve_workers(2) == 2
        monkeypatch.setenv('ALGREALISM_THREADS', 'many')
        with pytest.raises(InputValidationError):
            resolve_workers()

    def test_environment_caps_explicit_workers(self, monkeypatch):
        monkeypatch.setenv('ALGREALISM_THREADS', '2')
        assert resolve_workers(8) == 2
        monkeypatch.delenv('ALGREALISM_THREADS')
        assert resolve_workers(8) == 8
        assert resolve_workers() == 1
        monkeypatch.setenv('ALGREALISM_THREADS', '0')
        with pytest.raises(InputValidationError):
            resolve_workers(4)

    def test_derive_seed(self):
        assert derive_seed(5, 1) == derive_seed(5, 1)
        assert derive_seed(5, 1) != derive_seed(5, 2)
        assert derive_seed(5, 1, 0) != derive_seed(5, 1, 1)


class TestSimulation:
    """Tests for batch simulation and the Monte Carlo bound checks."""

    def test_single_codeword_code(self):
        codebook = sample_codebook(UNIFORM_BINARY, 0.5, 4, seed=0)
        code = OneShotCode(codebook, Kernel.symmetric(2, 0.1), UNIFORM_BINARY)
        report = simulate_batch(code, 1, [ConstantCritic(UNIFORM_BINARY, 0.0)], HAMMING, trials=2000, seed=3,
                                workers=1)
        assert report.collision_rate.estimate == 0.0
        assert report.mean_distortion.estimate == pytest.approx(0.5, abs=report.mean_distortion.half_width + 1e-9)
        assert report.critic_scores['constant'].estimate == 0.0

    def test_simulation_is_reproducible_across_workers(self):
        codebook = sample_codebook(UNIFORM_BINARY, 4, 4, seed=1)
        code = OneShotCode(codebook, Kernel.symmetric(2, 0.11), UNIFORM_BINARY)
        critics = [FrequencyCritic(UNIFORM_BINARY, 1)]
        first = simulate_batch(code, 2, critics, HAMMING, trials=600, seed=9, chunk_size=100, workers=1)
        second = simulate_batch(code, 2, critics, HAMMING, trials=600, seed=9, chunk_size=100, workers=3)
        assert first.model_dump() == second.model_dump()
        assert {row.metric for row in first.metric_rows()} == {
            'mean_distortion', 'collision_rate', 'critic_score[frequency]'}

    def test_rejects_mismatched_distortion(self):
        codebook = sample_codebook(UNIFORM_BINARY, 2, 3, seed=1)
        code = OneShotCode(codebook, Kernel.symmetric(2, 0.1), UNIFORM_BINARY)
        with pytest.raises(InputValidationError):
            simulate_batch(code, 1, [], DistortionMatrix.hamming(3), trials=10, seed=0, workers=1)

    def test_positive_score_bound_with_one_entry(self):
        check = lemma1_bound_check(UNIFORM_BINARY, 0.5, 1, 1, FrequencyCritic(UNIFORM_BINARY, 1),
                                   codebook_trials=50, message_draws=10, seed=4, workers=1)
        assert check.bound == pytest.approx(3.0)
        assert check.passed

    def test_collision_rate_matches_exact(self):
        check = claim2_empirical(4, 16, trials=20000, seed=6, workers=1)
        exact = 1 - (15 / 16) * (14 / 16) * (13 / 16)
        assert check.details['exact'] == pytest.approx(exact)
        assert check.passed

    def test_single_message_batches_never_collide(self):
        check = claim2_empirical(1, 64, trials=1000, seed=0, workers=1)
        assert check.estimate == 0.0
        assert check.passed

    def test_positive_score_grid(self):
        critics = [FrequencyCritic(UNIFORM_BINARY, 1), make_llr_critic(UNIFORM_BINARY, [0.9, 0.1])]
        report = lemma1_grid(UNIFORM_BINARY, [2, 3, 4], [1, 2, 4], 4, critics, codebook_trials=100,
                             message_draws=20, seed=8, workers=1)
        assert len(report.rows) == 18
        assert report.passed
        for row in report.rows:
            size = int(2 ** row['rate'])
            batch_size = row['batch_size']
            assert row['bound'] == pytest.approx(1 + (batch_size ** 2 / size) * batch_size * 5)
        # The mismatched llr critic scores above zero in every cell.
        assert all(row['mean_positive'] > 0 for row in report.rows if row['critic'] == 'llr')
        assert report.details['vacuous_cells'] <= 9

    @pytest.mark.slow
    def test_positive_score_grid_at_scale(self):
        critics = [FrequencyCritic(UNIFORM_BINARY, 1), make_llr_critic(UNIFORM_BINARY, [0.9, 0.1])]
        report = lemma1_grid(UNIFORM_BINARY, [2, 3, 4], [1, 2, 4], 1, critics, codebook_trials=1000,
                             message_draws=100, seed=0, workers=1)
        assert report.passed
        assert report.details['vacuous_cells'] < len(report.rows)

    def test_distinct_messages_give_product_reconstructions(self):
        source = FiniteSource([0.7, 0.3])

        def chunk(rng, count):
            entries = rng.choice(2, size=(count, 8), p=source.pmf)
            picks = rng.integers(8, size=(count, 2))
            pairs = np.take_along_axis(entries, picks, axis=1)
            return np.column_stack([pairs, picks[:, 0] != picks[:, 1]])

        results = run_trials(chunk, 200000, seed=12, chunk_size=20000, workers=1)
        pairs = results[results[:, 2] == 1, :2]
        observed = np.bincount(2 * pairs[:, 0] + pairs[:, 1], minlength=4) / len(pairs)
        assert observed == pytest.approx(product_pmf(source.pmf, 2), abs=0.006)

    def test_certified_code_meets_its_bounds(self):
        kernel = Kernel.symmetric(2, 0.1)
        rate = 0.8 * 8
        certificate = theorem2_certificate(UNIFORM_BINARY, kernel, HAMMING, rate=rate, delta=0.11, epsilon=0.05,
                                           gamma=0.1, batch_size=2, n=8)
        codebook = sample_codebook(UNIFORM_BINARY, rate, 8, seed=21)
        report = simulate_batch(OneShotCode(codebook, kernel, UNIFORM_BINARY), 2, [FrequencyCritic(UNIFORM_BINARY, 1)],
                                HAMMING, trials=10000, seed=22, workers=1)
        distortion = report.mean_distortion
        score = report.critic_scores['frequency']
        assert certificate.codebook_size == 84
        assert distortion.estimate <= certificate.delta_prime + distortion.half_width
        assert score.estimate <= certificate.score_bound + score.half_width


class TestCertificates:
    """Tests for the set mass and the distortion and score certificate."""

    def test_a_set_mass_single_letter(self):
        joint = JointPmf.from_kernel(UNIFORM_BINARY, Kernel.symmetric(2, 0.1))
        assert a_set_mass(joint, 3, 0.5) == (0.0, 0.0)

    def test_a_set_mass_modes_agree(self):
        joint = JointPmf.from_kernel(UNIFORM_BINARY, Kernel.symmetric(2, 0.2))
        exact, _ = a_set_mass(joint, 4, 0.05, n=8)
        estimate, half_width = a_set_mass(joint, 4, 0.05, n=8, mode='montecarlo', trials=20000, seed=2,
                                          workers=1)
        assert 0.0 < exact < 1.0
        assert estimate == pytest.approx(exact, abs=half_width + 1e-3)

    def test_hoeffding_bound_dominates_mass(self):
        joint = JointPmf.from_kernel(UNIFORM_BINARY, Kernel.symmetric(2, 0.1))
        exact, _ = a_set_mass(joint, 14.4, 0.1, n=16)
        assert exact <= a_set_hoeffding_bound(joint, 14.4, 0.1, n=16) + 1e-12

    def test_unknown_mode(self):
        joint = JointPmf.from_kernel(UNIFORM_BINARY, Kernel.symmetric(2, 0.1))
        with pytest.raises(InputValidationError):
            a_set_mass(joint, 3, 0.5, mode='guess')

    def test_certificate_formulas(self):
        certificate = theorem2_certificate(UNIFORM_BINARY, Kernel.symmetric(2, 0.11), HAMMING, rate=3, delta=0.11,
                                           epsilon=0.05, gamma=0.5, batch_size=1)
        eta = 2 ** -0.25
        assert certificate.eta == pytest.approx(0.8409, abs=1e-4)
        assert certificate.delta_prime == pytest.approx(0.11 + 0.05 + (6 * 0.11 / 0.05) * eta)
        assert certificate.score_bound == pytest.approx((3 * 0.11 / 0.05) * (1 + (1 / 8 + 2 * eta) * 2))
        assert certificate.codebook_size == 8

    def test_certificate_rejects_large_epsilon(self):
        with pytest.raises(InputValidationError):
            theorem2_certificate(UNIFORM_BINARY, Kernel.symmetric(2, 0.11), HAMMING, rate=3, delta=0.11,
                                 epsilon=0.06, gamma=0.5, batch_size=1)

    def test_certificate_rejects_marginal_drift(self):
        with pytest.raises(InputValidationError):
            theorem2_certificate(UNIFORM_BINARY, Kernel([[1.0, 0.0], [1.0, 0.0]]), HAMMING, rate=3, delta=0.6,
                                 epsilon=0.1, gamma=0.5, batch_size=1)

    def test_certificate_rejects_kernel_over_budget(self):
        with pytest.raises(InputValidationError):
            theorem2_certificate(UNIFORM_BINARY, Kernel.symmetric(2, 0.3), HAMMING, rate=3, delta=0.11,
                                 epsilon=0.05, gamma=0.5, batch_size=1)


class TestCovering:
    """Tests for soft covering and the encoder derandomization gap."""

    def test_independent_kernel_covers_exactly(self):
        check = soft_covering_gap(UNIFORM_BINARY, Kernel.independent(UNIFORM_BINARY), 2, 3, codebook_trials=20,
                                  seed=1, workers=1)
        assert check.estimate == pytest.approx(0.0, abs=1e-12)
        assert check.passed

    @pytest.mark.filterwarnings('error::DeprecationWarning')
    def test_single_codeword_covering(self):
        check = soft_covering_gap(UNIFORM_BINARY, Kernel.symmetric(2, 0.1), 0.5, 1, codebook_trials=10,
                                  seed=1, workers=1)
        assert check.estimate == pytest.approx(0.4)
        assert check.half_width == pytest.approx(0.0, abs=1e-12)
        assert check.passed is True

    def test_covering_rejects_large_tables(self):
        with pytest.raises(ResourceLimitError):
            soft_covering_gap(UNIFORM_BINARY, Kernel.symmetric(2, 0.1), 4, 20, codebook_trials=1, seed=0)

    def test_derandomization_gap_exact(self):
        report = derandomization_gap(UNIFORM_BINARY, Kernel.symmetric(2, 0.1), 0.5, [2, 4], trials=100, seed=3)
        assert isinstance(report, SeriesReport)
        assert [row['n'] for row in report.rows] == [2, 4]
        assert all(row['method'] == 'exact' for row in report.rows)
        assert all(0.0 <= row['gap'] <= 1.0 for row in report.rows)

    def test_single_codeword_has_no_derandomization_gap(self):
        report = derandomization_gap(UNIFORM_BINARY, Kernel.symmetric(2, 0.1), 0.1, [2, 4, 8], trials=10, seed=3)
        assert [row['codebook_size'] for row in report.rows] == [1, 1, 1]
        assert all(row['gap'] == pytest.approx(0.0, abs=1e-12) for row in report.rows)

    def test_covering_gap_shrinks_with_rate(self):
        kernel = Kernel.symmetric(2, 0.1)
        information = mutual_information(JointPmf.from_kernel(UNIFORM_BINARY, kernel))
        gaps = [
            soft_covering_gap(UNIFORM_BINARY, kernel, factor * information * 8, 8, codebook_trials=200, seed=5,
                              workers=1).estimate
            for factor in (0.5, 1.0, 1.6)
        ]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[0] >= 2 * gaps[2]


class TestSequences:
    """Tests for the run-capped process and the sequence experiments."""

    def test_cap_rules(self):
        assert cap_for_length(64) == 3
        assert cap_for_length(64, 'log-2') == 4
        assert cap_for_length(2) == 1
        with pytest.raises(InputValidationError):
            cap_for_length(64, 'sqrt')

    def test_capped_process_respects_cap(self):
        bits = sample_run_capped(200, 50, 3, 0.5, np.random.default_rng(0))
        assert bits.shape == (50, 200)
        assert max(longest_equal_run(row.tolist()) for row in bits) <= 3

    def test_estimation_extremes(self):
        assert estimation_experiment(UNIFORM_BINARY, 1, 11, 1.0, trials=200, seed=0, workers=1) == 0.0
        # An odd number of bits can never split evenly.
        assert estimation_experiment(UNIFORM_BINARY, 1, 11, 0.01, trials=200, seed=0, workers=1) >= 0.99

    def test_estimation_rejects_large_tables(self):
        with pytest.raises(ResourceLimitError):
            estimation_experiment(UNIFORM_BINARY, 20, 10, 0.1, trials=1, seed=0)

    @pytest.mark.slow
    def test_run_separation(self):
        report = run_separation_experiment(0.5, [256, 1024, 4096], trials=10000, seed=0, workers=1)
        assert [row['cap'] for row in report.rows] == [3, 4, 4]
        assert all(row['iid_mean'] <= 1.0 for row in report.rows)
        assert report.rows[-1]['capped_mean'] - report.rows[-1]['iid_mean'] >= 1.0
        assert report.passed

    @pytest.mark.slow
    def test_frequency_sensitivity(self):
        report = frequency_sensitivity_experiment(FiniteSource.bernoulli(0.7), UNIFORM_BINARY, 1, [64, 256, 1024],
                                                  trials=10000, seed=0, workers=1)
        scores = [row['mean_score'] for row in report.rows]
        assert scores == sorted(scores)
        assert report.passed


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
