from .runner import derive_seed, resolve_workers, run_trials, thread_cap
from .reports import CSV_COLUMNS, BoundCheck, Certificate, Estimate, MetricRow, SeriesReport, TrialReport
from .simulation import claim2_empirical, lemma1_bound_check, lemma1_grid, simulate_batch
from .certificates import a_set_hoeffding_bound, a_set_mass, theorem2_certificate
from .covering import derandomization_gap, soft_covering_gap
from .sequences import (
    cap_for_length,
    estimation_experiment,
    frequency_sensitivity_experiment,
    run_separation_experiment,
    sample_run_capped,
)

__all__ = [
    'derive_seed',
    'resolve_workers',
    'thread_cap',
    'run_trials',
    'CSV_COLUMNS',
    'BoundCheck',
    'Certificate',
    'Estimate',
    'MetricRow',
    'SeriesReport',
    'TrialReport',
    'claim2_empirical',
    'lemma1_bound_check',
    'lemma1_grid',
    'simulate_batch',
    'a_set_hoeffding_bound',
    'a_set_mass',
    'theorem2_certificate',
    'derandomization_gap',
    'soft_covering_gap',
    'cap_for_length',
    'estimation_experiment',
    'frequency_sensitivity_experiment',
    'run_separation_experiment',
    'sample_run_capped',
]
