import re
import time
import yaml
import logging
from typing import Any, Callable, Dict, List, Optional, Tuple
from pathlib import Path
from datetime import datetime
from dotenv import load_dotenv

from ..cli.run_config import UNHASHED_FIELDS, RunConfig, defaults_from_yaml
from ..codec import Codebook, OneShotCode, codebook_size, sample_codebook
from ..core.blocks import as_block
from ..core.errors import BoundViolationError, InputValidationError
from ..core.types import FiniteSource, Kernel
from ..critics import (
    Critic,
    check_validity,
    exhaustive_moments,
    make_compressor_critic,
    make_constant_critic,
    make_empirical_tvd_critic,
    make_frequency_critic,
    make_llr_critic,
    make_mixture_critic,
    make_run_critic,
    validity_from_moments,
)
from ..experiments import (
    BoundCheck,
    MetricRow,
    claim2_empirical,
    derandomization_gap,
    derive_seed,
    estimation_experiment,
    frequency_sensitivity_experiment,
    lemma1_bound_check,
    run_separation_experiment,
    simulate_batch,
    soft_covering_gap,
    theorem2_certificate,
)
from ..rdp import rate_distortion_function, rdp_binary_oracle, rdp_function
from ..utils.output_formatter import OutputFormatter

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Slack on the exhaustive moment checks.
MOMENT_TOLERANCE = 1e-9

HandlerResult = Tuple[Dict[str, Any], List[MetricRow], bool]


class ExperimentOrchestrator:
    """Dispatches one subcommand per run and writes its JSON, CSV and summary reports."""

    def __init__(self, config_dir: Optional[str] = None):
        """
        Initialize the experiment orchestrator.

        Args:
            config_dir: Path to configuration directory (default: project config/)
        """
        # ALGREALISM_THREADS may come from .env
        load_dotenv()

        project_root = Path(__file__).parent.parent.parent
        if config_dir is None:
            config_dir = project_root / 'config'
        else:
            config_dir = Path(config_dir)

        self.solver_config = self._load_config(config_dir / 'solver_config.yaml')
        self.experiment_config = self._load_config(config_dir / 'experiment_config.yaml')
        self.version = self._read_version(project_root / 'VERSION.txt')

        self.handlers: Dict[str, Callable[[RunConfig], HandlerResult]] = {
            'rdp': self._run_rdp,
            'critic-verify': self._run_critic_verify,
            'critic-score': self._run_critic_score,
            'simulate': self._run_simulate,
            'certify': self._run_certify,
            'softcover': self._run_softcover,
            'runsep': self._run_runsep,
            'freqsens': self._run_freqsens,
            'derand': self._run_derand,
            'estimate': self._run_estimate,
            'collision': self._run_collision,
        }
        self.execution_history: List[Dict[str, Any]] = []

    def _load_config(self, config_path: Path) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        if not config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_path, 'r') as f:
            return yaml.safe_load(f) or {}

    @staticmethod
    def _read_version(version_path: Path) -> str:
        if not version_path.exists():
            return 'unknown'
        match = re.search(r'^Version:\s*(\S+)', version_path.read_text(encoding='utf-8'), re.MULTILINE)
        return match.group(1) if match else 'unknown'

    def defaults(self) -> Dict[str, Any]:
        """RunConfig defaults taken from config/experiment_config.yaml."""
        return defaults_from_yaml(self.experiment_config)

    def run(self, config: RunConfig) -> Dict[str, Any]:
        """
        Run one subcommand and write its reports to config.out_dir.

        Args:
            config: Validated run configuration

        Returns:
            The report written as JSON

        Raises:
            BoundViolationError: If a checked bound fails; the reports are written first
        """
        start = time.time()
        config_hash = config.config_hash()
        logger.info(f"Running '{config.command}' (config {config_hash}, seed {config.seed})")

        try:
            payload, rows, passed = self.handlers[config.command](config)
        except Exception as e:
            self._log_execution(config, config_hash, time.time() - start, success=False, error=str(e))
            raise

        report = {
            'version': self.version,
            'command': config.command,
            'config_hash': config_hash,
            'seed': config.seed,
            'config': config.model_dump(exclude=UNHASHED_FIELDS),
            'passed': passed,
            'result': payload,
        }
        csv_rows = [row.to_csv_row(config_hash) for row in rows]

        output_dir = Path(config.out_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        stem = config.command.replace('-', '_')
        OutputFormatter.save_json(report, str(output_dir / f'{stem}_report.json'))
        OutputFormatter.save_csv(csv_rows, str(output_dir / f'{stem}_metrics.csv'))
        summary_path = output_dir / f'{stem}_summary.txt'
        with open(summary_path, 'w', encoding='utf-8') as f:
            f.write(OutputFormatter.create_summary_report(config.command, report, csv_rows))

        duration = time.time() - start
        self._log_execution(config, config_hash, duration, success=passed,
                            error=None if passed else 'bound violated')
        logger.info(f"'{config.command}' finished in {duration:.2f}s; reports saved to: {output_dir}")

        if not passed:
            failed = [row.metric for row in rows if row.passed is False]
            raise BoundViolationError(f"'{config.command}' failed: {', '.join(failed) or 'bound check'}")
        return report

    def _log_execution(self, config: RunConfig, config_hash: str, duration: float,
                       success: bool, error: Optional[str]):
        self.execution_history.append({
            'timestamp': datetime.now().isoformat(),
            'command': config.command,
            'config_hash': config_hash,
            'duration_seconds': duration,
            'success': success,
            'error': error,
        })

    def get_execution_history(self) -> List[Dict[str, Any]]:
        """Get execution history of this orchestrator's runs."""
        return self.execution_history

    # Builders

    def build_critic(self, config: RunConfig, source: FiniteSource) -> Critic:
        """Critic of kind config.critic declared against the source."""
        kind = config.critic
        if kind == 'llr':
            config.require('q_pmf')
            return make_llr_critic(source, config.q_pmf)
        if kind == 'frequency':
            return make_frequency_critic(source, config.e0)
        if kind == 'run':
            critic = make_run_critic(config.q, config.max_length)
            critic.check_alphabet(source.alphabet_size)
            return critic
        if kind == 'compressor':
            return make_compressor_critic(source, config.coder)
        if kind == 'empirical_tvd':
            return make_empirical_tvd_critic(source, config.bn_rule)
        if kind == 'mixture':
            return make_mixture_critic([
                (make_frequency_critic(source, config.e0), 0.5),
                (make_compressor_critic(source, config.coder), 0.5),
            ])
        return make_constant_critic(source, config.value)

    def resolve_kernel(self, config: RunConfig) -> Kernel:
        """--kernel, else a symmetric channel from --crossover, else the RDP-optimal kernel at --delta."""
        source = config.source()
        if config.kernel is not None:
            return config.kernel_matrix()
        if config.crossover is not None:
            return Kernel.symmetric(source.alphabet_size, config.crossover)
        if config.delta is not None:
            return self._solve(config).kernel
        raise InputValidationError(f"'{config.command}' needs --kernel, --crossover or --delta")

    def _solve(self, config: RunConfig):
        solver = self.solver_config.get('solver', {})
        return rdp_function(
            config.source(), config.distortion_matrix(), config.delta,
            bisection_steps=solver.get('bisection_steps', 200),
            sinkhorn_tolerance=solver.get('sinkhorn_tolerance', 1e-12),
        )

    def _build_code(self, config: RunConfig, kernel: Kernel) -> OneShotCode:
        source = config.source()
        if config.codebook_file is not None:
            codebook_path = Path(config.codebook_file)
            if not codebook_path.exists():
                raise InputValidationError(f"Codebook file not found: {codebook_path}")
            codebook = Codebook.from_json(codebook_path.read_text(encoding='utf-8'))
        else:
            codebook = sample_codebook(source, config.total_rate(), config.n, derive_seed(config.seed, 0))
        return OneShotCode(codebook, kernel, source, config.encoder_mode)

    def _lengths(self, config: RunConfig) -> List[int]:
        return config.lengths or [config.n]

    # Handlers

    def _run_rdp(self, config: RunConfig) -> HandlerResult:
        config.require('delta')
        source, d = config.source(), config.distortion_matrix()
        solution = self._solve(config)
        classical = rate_distortion_function(source, d, config.delta)
        payload = {'solution': solution.model_dump(), 'classical_rate': classical}
        rows = [
            MetricRow(metric='rdp_rate', estimate=solution.rate),
            MetricRow(metric='classical_rate', estimate=classical, bound=solution.rate,
                      passed=classical <= solution.rate + 1e-6),
            MetricRow(metric='achieved_distortion', estimate=solution.achieved_distortion, bound=config.delta,
                      passed=solution.achieved_distortion <= config.delta + 1e-6),
            MetricRow(metric='min_distortion', estimate=solution.min_distortion),
        ]
        if source.alphabet_size == 2:
            oracle_config = self.solver_config.get('oracle', {})
            oracle = rdp_binary_oracle(
                float(source.pmf[0]), d, config.delta,
                grid=oracle_config.get('initial_grid', 1024),
                tolerance=oracle_config.get('tolerance', 1e-5),
            )
            agreement = oracle_config.get('agreement_tolerance', 1e-3)
            payload['oracle_rate'] = oracle
            rows.append(MetricRow(metric='oracle_gap', estimate=abs(solution.rate - oracle), bound=agreement,
                                  passed=abs(solution.rate - oracle) <= agreement))
        logger.info(f"R1({config.delta}) = {solution.rate:.6f} bits (classical {classical:.6f})")
        return payload, rows, all(row.passed is not False for row in rows)

    def _run_critic_verify(self, config: RunConfig) -> HandlerResult:
        critic = self.build_critic(config, config.source())
        reports, rows = [], []
        for n in self._lengths(config):
            moments = exhaustive_moments(critic, n) if config.mode == 'exhaustive' else None
            if moments is not None:
                validity = validity_from_moments(critic, moments)
            else:
                validity = check_validity(critic, n, config.mode, config.trials, derive_seed(config.seed, n))
            entry = {'validity': validity.model_dump(by_alias=True)}
            rows.append(MetricRow(metric=f'validity_sum[n={n}]', estimate=validity.sum,
                                  half_width=validity.half_width, bound=1.0, passed=validity.passed))
            if moments is not None:
                entry['moments'] = moments.model_dump()
                for metric, value, bound in (
                    ('exp_positive_score', moments.exp_positive, 2.0),
                    ('mean_positive_score', moments.mean_positive, 1.0),
                    ('max_positive_score', moments.max_positive, moments.max_bound),
                ):
                    rows.append(MetricRow(metric=f'{metric}[n={n}]', estimate=value, bound=bound,
                                          passed=value <= bound + MOMENT_TOLERANCE))
            reports.append(entry)
        payload = {'critic': critic.describe(), 'lengths': reports}
        return payload, rows, all(row.passed is not False for row in rows)

    def _run_critic_score(self, config: RunConfig) -> HandlerResult:
        config.require('blocks_file')
        blocks_path = Path(config.blocks_file)
        if not blocks_path.exists():
            raise InputValidationError(f"Block file not found: {blocks_path}")
        source = config.source()
        critic = self.build_critic(config, source)

        scores, rows = [], []
        lines = [line.strip() for line in blocks_path.read_text(encoding='utf-8').splitlines()]
        for i, line in enumerate(line for line in lines if line):
            block = as_block(line, source.alphabet_size)
            score = critic.score(block)
            scores.append({'block': line, 'score': score})
            rows.append(MetricRow(metric=f'score[{i}]', estimate=score))
        logger.info(f"Scored {len(scores)} blocks with the {critic.kind} critic")
        return {'critic': critic.describe(), 'scores': scores}, rows, True

    def _run_simulate(self, config: RunConfig) -> HandlerResult:
        code = self._build_code(config, self.resolve_kernel(config))
        critic = self.build_critic(config, config.source())
        report = simulate_batch(code, config.batch_size, [critic], config.distortion_matrix(), config.trials,
                                derive_seed(config.seed, 1), config.chunk_size, config.workers)
        return report.model_dump(), report.metric_rows(), True

    def _run_certify(self, config: RunConfig) -> HandlerResult:
        config.require('delta')
        source, d = config.source(), config.distortion_matrix()
        kernel = self.resolve_kernel(config)
        rate = config.total_rate()
        certificate = theorem2_certificate(
            source, kernel, d, rate, config.delta, config.epsilon, config.gamma, config.batch_size,
            config.n, config.a_set_mode, config.trials, derive_seed(config.seed, 3),
        )
        code = self._build_code(config, kernel)
        critic = self.build_critic(config, source)
        simulation = simulate_batch(code, config.batch_size, [critic], d, config.trials,
                                    derive_seed(config.seed, 1), config.chunk_size, config.workers)
        score = next(iter(simulation.critic_scores.values()))
        checks = [
            BoundCheck(name='mean_distortion', estimate=simulation.mean_distortion.estimate,
                       half_width=simulation.mean_distortion.half_width, bound=certificate.delta_prime,
                       passed=simulation.mean_distortion.estimate
                       <= certificate.delta_prime + simulation.mean_distortion.half_width),
            BoundCheck(name='mean_critic_score', estimate=score.estimate, half_width=score.half_width,
                       bound=certificate.score_bound,
                       passed=score.estimate <= certificate.score_bound + score.half_width),
            lemma1_bound_check(source, rate, config.batch_size, config.n, critic, config.codebook_trials,
                               config.message_draws, derive_seed(config.seed, 2), workers=config.workers),
        ]
        rows = certificate.metric_rows()
        for check in checks:
            rows.extend(check.metric_rows())
        payload = {
            'certificate': certificate.model_dump(),
            'simulation': simulation.model_dump(),
            'checks': [check.model_dump() for check in checks],
        }
        return payload, rows, all(check.passed for check in checks)

    def _run_softcover(self, config: RunConfig) -> HandlerResult:
        check = soft_covering_gap(config.source(), self.resolve_kernel(config), config.total_rate(), config.n,
                                  config.codebook_trials, config.seed, config.gamma, workers=config.workers)
        return check.model_dump(), check.metric_rows(), check.passed

    def _run_runsep(self, config: RunConfig) -> HandlerResult:
        series = run_separation_experiment(config.q, self._lengths(config), config.trials, config.seed,
                                           config.cap_rule, config.chunk_size, config.workers)
        return series.model_dump(), series.metric_rows(), bool(series.passed)

    def _run_freqsens(self, config: RunConfig) -> HandlerResult:
        config.require('true_pmf')
        series = frequency_sensitivity_experiment(FiniteSource(config.true_pmf), config.source(), config.e0,
                                                  self._lengths(config), config.trials, config.seed,
                                                  config.chunk_size, config.workers)
        return series.model_dump(), series.metric_rows(), bool(series.passed)

    def _run_derand(self, config: RunConfig) -> HandlerResult:
        config.require('rate_per_symbol')
        series = derandomization_gap(config.source(), self.resolve_kernel(config), config.rate_per_symbol,
                                     self._lengths(config), config.trials, config.seed, config.workers)
        return series.model_dump(), series.metric_rows(), True

    def _run_estimate(self, config: RunConfig) -> HandlerResult:
        probability = estimation_experiment(config.source(), config.n, config.samples, config.epsilon,
                                            config.trials, config.seed, workers=config.workers)
        payload = {'n': config.n, 'samples': config.samples, 'epsilon': config.epsilon,
                   'probability': probability}
        return payload, [MetricRow(metric='tvd_exceedance_probability', estimate=probability)], True

    def _run_collision(self, config: RunConfig) -> HandlerResult:
        size = codebook_size(config.total_rate())
        check = claim2_empirical(config.batch_size, size, config.trials, config.seed,
                                 config.chunk_size, config.workers)
        return check.model_dump(), check.metric_rows(), check.passed
