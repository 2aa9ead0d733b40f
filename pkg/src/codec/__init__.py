from .codebook import Codebook, codebook_size, sample_codebook
from .one_shot import (
    ENCODER_MODES,
    OneShotCode,
    collision_bound,
    decode,
    encode,
    message_distributions,
)

__all__ = [
    'Codebook',
    'codebook_size',
    'sample_codebook',
    'ENCODER_MODES',
    'OneShotCode',
    'collision_bound',
    'decode',
    'encode',
    'message_distributions',
]
