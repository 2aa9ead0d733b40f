from .output_formatter import OutputFormatter
from .validator import Validator

__all__ = ['OutputFormatter', 'Validator']
