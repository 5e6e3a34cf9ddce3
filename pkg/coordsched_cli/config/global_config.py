"""
Global configuration for the coordsched CLI.
"""

import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Union

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "coordsched-config.yml"


@dataclass
class GlobalConfig:
    """Global configuration settings."""
    # default voter contract, used when the store has no __voter entries
    voter_wcet_ms: float = 0.5
    voter_energy_mj: float = 0.1

    exhaustive_max_tasks: int = 8
    exhaustive_warn_tasks: int = 6

    comm_cost_ms: float = 0.0
    gantt_width: int = 60
    heuristic_ratio_bound: float = 2.0


def load_global_config(path: Optional[Union[str, Path]] = None) -> GlobalConfig:
    """
    Load global configuration from file or use defaults.

    Args:
        path: Explicit config file; defaults to coordsched-config.yml in the working directory

    Returns:
        GlobalConfig; unreadable files and bad values fall back to defaults with a warning
    """
    config_file = Path(path) if path else Path(DEFAULT_CONFIG_FILE)

    if not config_file.exists():
        if path:
            logger.warning(f"Config file {config_file} not found, using defaults")
        return GlobalConfig()

    try:
        with open(config_file, 'r') as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        logger.warning(f"Failed to load global config: {e}")
        return GlobalConfig()

    if not isinstance(data, dict):
        logger.warning(f"Global config {config_file} is not a mapping, using defaults")
        return GlobalConfig()

    defaults = GlobalConfig()
    values = {}
    for fld in fields(GlobalConfig):
        if fld.name not in data:
            continue
        default = getattr(defaults, fld.name)
        raw = data[fld.name]
        try:
            value = type(default)(raw)
        except (TypeError, ValueError):
            logger.warning(f"Ignoring {fld.name}={raw!r} in {config_file}: expected {type(default).__name__}")
            continue
        if value < 0 or (value == 0 and fld.name != "comm_cost_ms"):
            logger.warning(f"Ignoring {fld.name}={raw!r} in {config_file}: out of range")
            continue
        values[fld.name] = value

    known = {fld.name for fld in fields(GlobalConfig)}
    for key in sorted(set(data) - known):
        logger.warning(f"Unknown key '{key}' in {config_file}")

    return GlobalConfig(**values)
