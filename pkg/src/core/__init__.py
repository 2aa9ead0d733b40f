from .errors import (
    AlgRealismError,
    BoundViolationError,
    InfeasibleDistortionError,
    InputValidationError,
    NumericalError,
    ResourceLimitError,
    UnsupportedLengthError,
)
from .types import DistortionMatrix, FiniteSource, JointPmf, Kernel
from .probability import (
    CONFIDENCE_SIGMAS,
    batch_tvd_bound_check,
    binary_entropy,
    entropy,
    information_density,
    marginal_tvd,
    mean_and_half_width,
    mutual_information,
    product_pmf,
    shared_channel_tvd,
    tvd,
)
from .blocks import (
    additive_distortion,
    all_blocks,
    as_batch,
    as_block,
    block_range,
    block_to_index,
    blocks_to_indices,
    concatenate,
    empirical_block_distribution,
    format_block,
    index_to_block,
    parse_block,
)

__all__ = [
    'CONFIDENCE_SIGMAS',
    'AlgRealismError',
    'BoundViolationError',
    'InfeasibleDistortionError',
    'InputValidationError',
    'NumericalError',
    'ResourceLimitError',
    'UnsupportedLengthError',
    'DistortionMatrix',
    'FiniteSource',
    'JointPmf',
    'Kernel',
    'batch_tvd_bound_check',
    'binary_entropy',
    'entropy',
    'information_density',
    'marginal_tvd',
    'mean_and_half_width',
    'mutual_information',
    'product_pmf',
    'shared_channel_tvd',
    'tvd',
    'additive_distortion',
    'all_blocks',
    'as_batch',
    'as_block',
    'block_range',
    'block_to_index',
    'blocks_to_indices',
    'concatenate',
    'empirical_block_distribution',
    'format_block',
    'index_to_block',
    'parse_block',
]
