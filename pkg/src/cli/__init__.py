from .run_config import COMMANDS, CRITIC_KINDS, RunConfig, load_config_file, resolve_config

__all__ = ['COMMANDS', 'CRITIC_KINDS', 'RunConfig', 'load_config_file', 'resolve_config']
