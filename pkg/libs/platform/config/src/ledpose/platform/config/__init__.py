"""ledpose platform configuration helpers."""

from .loader import (
    EnvLoader,
    bootstrap_env,
    dump_config_file,
    find_project_dir,
    layer_config,
    load_config_file,
    set_dotted,
)
from .settings import RuntimeSettings, SettingsBase

__all__ = [
    "EnvLoader",
    "RuntimeSettings",
    "SettingsBase",
    "bootstrap_env",
    "dump_config_file",
    "find_project_dir",
    "layer_config",
    "load_config_file",
    "set_dotted",
]
