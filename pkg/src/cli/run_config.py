"""
Validated run configuration and its canonical hash.

Values resolve in the order YAML defaults < --config file < command-line flags.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.errors import InputValidationError
from ..core.types import DistortionMatrix, FiniteSource, Kernel

COMMANDS = (
    'rdp', 'critic-verify', 'critic-score', 'simulate', 'certify', 'softcover',
    'runsep', 'freqsens', 'derand', 'estimate', 'collision',
)
CRITIC_KINDS = ('llr', 'frequency', 'run', 'compressor', 'empirical_tvd', 'mixture', 'constant')
# Fields that change where or how fast a run happens, never its results.
UNHASHED_FIELDS = {'out_dir', 'workers'}


class RunConfig(BaseModel):
    """Every parameter a subcommand may read; unset values fall back to YAML defaults."""

    model_config = ConfigDict(extra='forbid')

    command: str
    pmf: List[float] = Field(default_factory=lambda: [0.5, 0.5])
    distortion: Optional[List[List[float]]] = None
    kernel: Optional[List[List[float]]] = None
    crossover: Optional[float] = None
    delta: Optional[float] = None
    rate: Optional[float] = None
    rate_per_symbol: Optional[float] = None
    epsilon: float = 0.05
    gamma: float = 0.1
    batch_size: int = Field(default=1, ge=1)
    n: int = Field(default=1, ge=1)
    lengths: List[int] = Field(default_factory=list)
    trials: int = Field(default=100_000, ge=1)
    codebook_trials: int = Field(default=1000, ge=1)
    message_draws: int = Field(default=100, ge=1)
    samples: int = Field(default=4096, ge=1)
    seed: int = 0
    chunk_size: int = Field(default=1000, ge=1)
    workers: Optional[int] = Field(default=None, ge=1)

    critic: str = 'frequency'
    mode: str = 'exhaustive'
    e0: int = 1
    q: float = 0.5
    q_pmf: Optional[List[float]] = None
    true_pmf: Optional[List[float]] = None
    coder: str = 'lz78'
    bn_rule: str = 'square'
    value: float = 0.0
    max_length: int = Field(default=4096, ge=1)
    cap_rule: str = 'loglog'
    encoder_mode: str = 'posterior'
    a_set_mode: str = 'exact'
    blocks_file: Optional[str] = None
    codebook_file: Optional[str] = None
    out_dir: str = 'data/output'

    @model_validator(mode='after')
    def check_domain(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.critic not in CRITIC_KINDS:
            raise ValueError(f"unknown critic kind {self.critic!r}; expected one of {CRITIC_KINDS}")
        if self.mode not in ('exhaustive', 'montecarlo'):
            raise ValueError(f"mode must be 'exhaustive' or 'montecarlo', got {self.mode!r}")
        if self.encoder_mode not in ('posterior', 'map'):
            raise ValueError(f"encoder mode must be 'posterior' or 'map', got {self.encoder_mode!r}")
        # Constructing the value types runs their validation.
        source = self.source()
        if self.distortion is not None:
            self.distortion_matrix()
        if self.kernel is not None:
            self.kernel_matrix()
        if not 0 <= self.e0 < source.alphabet_size:
            raise ValueError(f"e0={self.e0} is outside the alphabet of size {source.alphabet_size}")
        if self.delta is not None and self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.rate is not None and self.rate <= 0:
            raise ValueError(f"rate must be > 0 bits, got {self.rate}")
        if any(length < 1 for length in self.lengths):
            raise ValueError(f"lengths must be positive, got {self.lengths}")
        return self

    def source(self) -> FiniteSource:
        return FiniteSource(self.pmf)

    def distortion_matrix(self) -> DistortionMatrix:
        if self.distortion is None:
            return DistortionMatrix.hamming(len(self.pmf))
        matrix = DistortionMatrix(self.distortion)
        if matrix.alphabet_size != len(self.pmf):
            raise InputValidationError(f"distortion is {matrix.alphabet_size}x{matrix.alphabet_size}, pmf has {len(self.pmf)} entries")
        return matrix

    def kernel_matrix(self) -> Kernel:
        kernel = Kernel(self.kernel)
        if kernel.alphabet_size != len(self.pmf):
            raise InputValidationError(f"kernel is {kernel.alphabet_size}x{kernel.alphabet_size}, pmf has {len(self.pmf)} entries")
        return kernel

    def total_rate(self) -> float:
        """Total rate in bits: --rate, else --rate-per-symbol times n."""
        if self.rate is not None:
            return self.rate
        if self.rate_per_symbol is not None:
            return self.rate_per_symbol * self.n
        raise InputValidationError(f"'{self.command}' needs --rate or --rate-per-symbol")

    def require(self, *names: str):
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise InputValidationError(f"'{self.command}' needs " + ", ".join(f"--{m.replace('_', '-')}" for m in missing))

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of the hashed fields, first 16 hex digits."""
        canonical = json.dumps(self.model_dump(exclude=UNHASHED_FIELDS), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]


def load_config_file(path: str) -> Dict[str, Any]:
    """Load a JSON or YAML config file; JSON parses as YAML."""
    config_path = Path(path)
    if not config_path.exists():
        raise InputValidationError(f"Configuration file not found: {config_path}")
    with open(config_path, 'r', encoding='utf-8') as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise InputValidationError(f"Configuration file {config_path} must hold a mapping")
    return {key.replace('-', '_'): value for key, value in data.items()}


def defaults_from_yaml(experiment_config: Dict[str, Any]) -> Dict[str, Any]:
    """Map config/experiment_config.yaml onto RunConfig fields."""
    experiments = experiment_config.get('experiments', {})
    critics = experiment_config.get('critics', {})
    certificate = experiment_config.get('certificate', {})
    estimation = experiment_config.get('estimation', {})
    mapped = {
        'trials': experiments.get('trials'),
        'codebook_trials': experiments.get('codebook_trials'),
        'message_draws': experiments.get('message_draws'),
        'chunk_size': experiments.get('chunk_size'),
        'seed': experiments.get('seed'),
        'out_dir': experiments.get('output_dir'),
        'q': critics.get('run', {}).get('q'),
        'max_length': critics.get('run', {}).get('max_length'),
        'cap_rule': critics.get('run', {}).get('cap_rule'),
        'e0': critics.get('frequency', {}).get('e0'),
        'coder': critics.get('compressor', {}).get('coder'),
        'bn_rule': critics.get('empirical_tvd', {}).get('bn_rule'),
        'epsilon': certificate.get('epsilon'),
        'gamma': certificate.get('gamma'),
        'a_set_mode': certificate.get('a_set_mode'),
        'samples': estimation.get('samples'),
    }
    return {key: value for key, value in mapped.items() if value is not None}


def resolve_config(command: str, defaults: Dict[str, Any], file_values: Dict[str, Any],
                   flag_values: Dict[str, Any]) -> RunConfig:
    """Merge the three layers (later wins) and validate."""
    merged: Dict[str, Any] = {}
    for layer in (defaults, file_values, flag_values):
        merged.update({key: value for key, value in layer.items() if value is not None})
    merged['command'] = command
    return RunConfig(**merged)
