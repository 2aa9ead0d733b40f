"""
Report models shared by every experiment. Each report flattens into CSV rows
with the fixed columns of CSV_COLUMNS.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from ..core.probability import mean_and_half_width

CSV_COLUMNS = ['config_hash', 'metric', 'estimate', 'half_width', 'bound', 'pass']


class Estimate(BaseModel):
    """A Monte Carlo mean with its 3-sigma half-width."""

    estimate: float
    half_width: float = 0.0

    @classmethod
    def from_samples(cls, samples) -> "Estimate":
        estimate, half_width = mean_and_half_width(samples)
        return cls(estimate=estimate, half_width=half_width)


class MetricRow(BaseModel):
    """One CSV row; None fields become empty cells."""

    metric: str
    estimate: float
    half_width: Optional[float] = None
    bound: Optional[float] = None
    passed: Optional[bool] = None

    def to_csv_row(self, config_hash: str) -> Dict[str, Any]:
        return {
            'config_hash': config_hash,
            'metric': self.metric,
            'estimate': self.estimate,
            'half_width': self.half_width,
            'bound': self.bound,
            'pass': self.passed,
        }


class TrialReport(BaseModel):
    trials: int = Field(ge=1)
    n: int
    batch_size: int
    seed: int
    mean_distortion: Estimate
    critic_scores: Dict[str, Estimate]
    collision_rate: Estimate
    config: Dict[str, Any] = Field(default_factory=dict)

    def metric_rows(self) -> List[MetricRow]:
        rows = [
            MetricRow(metric='mean_distortion', estimate=self.mean_distortion.estimate,
                      half_width=self.mean_distortion.half_width),
            MetricRow(metric='collision_rate', estimate=self.collision_rate.estimate,
                      half_width=self.collision_rate.half_width),
        ]
        for name, score in self.critic_scores.items():
            rows.append(MetricRow(metric=f'critic_score[{name}]', estimate=score.estimate,
                                  half_width=score.half_width))
        return rows


class Certificate(BaseModel):
    """Distortion and realism bounds of the one-shot random code."""

    delta_prime: float
    score_bound: float
    eta: float
    a_set_mass: float
    a_set_hoeffding: float
    delta: float
    epsilon: float
    gamma: float
    rate: float
    batch_size: int
    n: int
    codebook_size: int

    def metric_rows(self) -> List[MetricRow]:
        return [
            MetricRow(metric='delta_prime', estimate=self.delta_prime),
            MetricRow(metric='score_bound', estimate=self.score_bound),
            MetricRow(metric='eta', estimate=self.eta),
            MetricRow(metric='a_set_mass', estimate=self.a_set_mass, bound=self.a_set_hoeffding),
        ]


class BoundCheck(BaseModel):
    """A Monte Carlo estimate tested against an upper bound."""

    name: str
    estimate: float
    half_width: float
    bound: float
    passed: bool
    details: Dict[str, Any] = Field(default_factory=dict)

    def metric_rows(self) -> List[MetricRow]:
        return [MetricRow(metric=self.name, estimate=self.estimate, half_width=self.half_width,
                          bound=self.bound, passed=self.passed)]


class SeriesReport(BaseModel):
    """
    A table of measurements, one row per parameter setting (e.g. block length).

    Columns named '<metric>_half_width' attach to '<metric>'; key columns
    label the CSV metric names.
    """

    name: str
    key_columns: List[str]
    rows: List[Dict[str, Any]]
    passed: Optional[bool] = None
    details: Dict[str, Any] = Field(default_factory=dict)

    def metric_rows(self) -> List[MetricRow]:
        metrics = []
        for row in self.rows:
            label = ','.join(f'{key}={row[key]}' for key in self.key_columns)
            for column, value in row.items():
                if column in self.key_columns or column.endswith('_half_width'):
                    continue
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    continue
                metrics.append(MetricRow(
                    metric=f'{self.name}.{column}[{label}]',
                    estimate=float(value),
                    half_width=row.get(f'{column}_half_width'),
                ))
        if metrics and self.passed is not None:
            metrics[-1].passed = self.passed
        return metrics
