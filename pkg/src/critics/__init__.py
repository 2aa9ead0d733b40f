from .base_critic import NEG_INF_SCORE, ConstantCritic, Critic, make_constant_critic
from .likelihood import LikelihoodRatioCritic, make_llr_critic
from .frequency import FrequencyCritic, make_frequency_critic
from .runs import RunCritic, longest_run, longest_run_moments, longest_runs, make_run_critic
from .compressor import (
    CompressorCritic,
    Lz78Coder,
    RawCoder,
    elias_gamma_decode,
    elias_gamma_encode,
    get_coder,
    kraft_sum,
    make_compressor_critic,
)
from .empirical_tvd import EmpiricalTvdCritic, fit_offset, make_empirical_tvd_critic
from .mixture import MixtureCritic, make_mixture_critic
from .validity import (
    ExhaustiveMoments,
    ValidityReport,
    check_validity,
    exhaustive_moments,
    positive_part_stats,
    validity_from_moments,
)

__all__ = [
    'NEG_INF_SCORE',
    'ConstantCritic',
    'Critic',
    'make_constant_critic',
    'LikelihoodRatioCritic',
    'make_llr_critic',
    'FrequencyCritic',
    'make_frequency_critic',
    'RunCritic',
    'longest_run',
    'longest_run_moments',
    'longest_runs',
    'make_run_critic',
    'CompressorCritic',
    'Lz78Coder',
    'RawCoder',
    'elias_gamma_decode',
    'elias_gamma_encode',
    'get_coder',
    'kraft_sum',
    'make_compressor_critic',
    'EmpiricalTvdCritic',
    'fit_offset',
    'make_empirical_tvd_critic',
    'MixtureCritic',
    'make_mixture_critic',
    'ExhaustiveMoments',
    'ValidityReport',
    'check_validity',
    'exhaustive_moments',
    'positive_part_stats',
    'validity_from_moments',
]
