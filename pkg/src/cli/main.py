"""
Command-line front end.

    python run_algrealism.py rdp --pmf 0.5,0.5 --hamming --delta 0.11
    python run_algrealism.py critic verify --kind frequency --pmf 0.5,0.5 --e0 1 --n 8

Exit codes: 0 when every checked bound holds, 2 on a bound violation, 1 on
invalid input.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from .run_config import CRITIC_KINDS, load_config_file, resolve_config
from ..core.errors import AlgRealismError, BoundViolationError
from ..orchestrator.experiment_orchestrator import ExperimentOrchestrator

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_INPUT_ERROR = 1
EXIT_BOUND_VIOLATION = 2

SUBCOMMANDS = {
    'rdp': 'Solve the marginal-preserving rate-distortion problem and cross-check the binary oracle',
    'simulate': 'Simulate batches of the one-shot code and score the reconstructions',
    'certify': 'Compute the distortion and critic-score certificate and test it by simulation',
    'softcover': 'Measure the soft-covering TVD of random codebooks',
    'runsep': 'Run-critic scores of i.i.d. and run-capped sequences',
    'freqsens': 'Frequency-critic scores of data from a mismatched source',
    'derand': 'TVD between the posterior and map encoders message distributions',
    'estimate': 'Probability that the empirical block distribution misses p^n by epsilon',
    'collision': 'Empirical collision rate of B uniform messages out of floor(2^R)',
}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> List[float]:
    try:
        return [float(value) for value in text.split(',') if value.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(value) for value in text.split(',') if value.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _matrix(text: str) -> List[List[float]]:
    """Rows separated by ';', entries by ','."""
    return [_float_list(row) for row in text.split(';') if row.strip()]


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # Every default is None so that unset flags never override the config file.
    source = common.add_argument_group('source and distortion')
    source.add_argument('--pmf', type=_float_list, help='Source pmf, e.g. 0.5,0.5')
    source.add_argument('--hamming', action='store_true', default=None, help='Hamming distortion (default)')
    source.add_argument('--distortion', type=_matrix, help="Distortion matrix, rows split by ';'")
    source.add_argument('--kernel', type=_matrix, help="Kernel p(y|x), rows split by ';'")
    source.add_argument('--crossover', type=float, help='Symmetric-channel crossover probability')
    source.add_argument('--delta', type=float, help='Distortion level')

    code = common.add_argument_group('code')
    code.add_argument('--rate', type=float, help='Total rate R in bits')
    code.add_argument('--rate-per-symbol', type=float, help='Rate per symbol; total rate is this times n')
    code.add_argument('--epsilon', type=float)
    code.add_argument('--gamma', type=float)
    code.add_argument('--B', '--batch-size', dest='batch_size', type=int, help='Batch size B')
    code.add_argument('--n', type=int, help='Block length')
    code.add_argument('--lengths', type=_int_list, help='Block lengths, e.g. 64,256,1024')
    code.add_argument('--encoder-mode', choices=['posterior', 'map'])
    code.add_argument('--codebook', dest='codebook_file', help='Codebook JSON to replay')
    code.add_argument('--a-set-mode', choices=['exact', 'montecarlo'])

    critic = common.add_argument_group('critic')
    critic.add_argument('--kind', dest='critic', choices=CRITIC_KINDS)
    critic.add_argument('--mode', choices=['exhaustive', 'montecarlo'])
    critic.add_argument('--e0', type=int, help='Symbol counted by the frequency critic')
    critic.add_argument('--q', type=float, help='P(1) of the run critic and the sequence experiments')
    critic.add_argument('--q-pmf', type=_float_list, help='Single-letter q of the llr critic')
    critic.add_argument('--true-pmf', type=_float_list, help='Data-generating pmf for freqsens')
    critic.add_argument('--coder', choices=['raw', 'lz78'])
    critic.add_argument('--bn-rule', choices=['square', 'cube'])
    critic.add_argument('--value', type=float, help='Score of the constant critic')
    critic.add_argument('--max-length', type=int)
    critic.add_argument('--cap-rule', choices=['loglog', 'log-2'])
    critic.add_argument('--blocks', dest='blocks_file', help='File of blocks, one per line')

    run = common.add_argument_group('run')
    run.add_argument('--trials', type=int)
    run.add_argument('--codebook-trials', type=int)
    run.add_argument('--message-draws', type=int)
    run.add_argument('--samples', type=int, help='Blocks per estimation trial')
    run.add_argument('--seed', type=int)
    run.add_argument('--chunk-size', type=int)
    run.add_argument('--workers', type=int, help='Worker threads (capped by ALGREALISM_THREADS)')
    run.add_argument('--config', help='JSON or YAML file of options; flags override it')
    run.add_argument('--config-dir', help='Directory holding solver_config.yaml and experiment_config.yaml')
    run.add_argument('--out-dir', help='Directory for the JSON, CSV and summary reports')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog='algrealism', description='Algorithmic-realism lossy compression toolkit')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    for name, help_text in SUBCOMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=help_text)

    critic = subparsers.add_parser('critic', help='Verify critics or score blocks')
    actions = critic.add_subparsers(dest='critic_command', metavar='ACTION')
    actions.required = True
    actions.add_parser('verify', parents=[common], help='Check validity and positive-part moments')
    actions.add_parser('score', parents=[common], help='Score every block of --blocks')
    return parser


def _flag_values(args: argparse.Namespace) -> Dict[str, Any]:
    skipped = {'command', 'critic_command', 'config', 'config_dir', 'hamming'}
    return {key: value for key, value in vars(args).items() if key not in skipped and value is not None}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return the exit code."""
    args = build_parser().parse_args(argv)
    command = f'critic-{args.critic_command}' if args.command == 'critic' else args.command

    try:
        orchestrator = ExperimentOrchestrator(args.config_dir)
        file_values = load_config_file(args.config) if args.config else {}
        flag_values = _flag_values(args)
        if args.hamming:
            if 'distortion' in flag_values:
                raise ValueError("--hamming and --distortion are mutually exclusive")
            file_values.pop('distortion', None)
        config = resolve_config(command, orchestrator.defaults(), file_values, flag_values)
        report = orchestrator.run(config)
    except BoundViolationError as e:
        logger.error(f"Bound violation: {e}")
        print(f"FAIL: {e}", file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    except (ValidationError, AlgRealismError, ValueError, FileNotFoundError) as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    print(f"PASS: {command} (config {report['config_hash']}, seed {report['seed']})")
    return EXIT_PASS


if __name__ == '__main__':
    sys.exit(main())
