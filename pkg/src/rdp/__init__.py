from .solver import (
    RdpSolution,
    min_marginal_preserving_distortion,
    rate_distortion_function,
    rdp_function,
)
from .oracle import rdp_binary_oracle

__all__ = [
    'RdpSolution',
    'min_marginal_preserving_distortion',
    'rate_distortion_function',
    'rdp_function',
    'rdp_binary_oracle',
]
