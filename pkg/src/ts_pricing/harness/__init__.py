from .config import (
    ExperimentConfig, expand_preset, preset_names, config_from_dict, config_to_dict,
    load_config, canonical_json,
)
from .runner import run_experiment, ExperimentResult
from .cli import cli_dispatch

__all__ = [
    "ExperimentConfig", "expand_preset", "preset_names", "config_from_dict",
    "config_to_dict", "load_config", "canonical_json", "run_experiment",
    "ExperimentResult", "cli_dispatch",
]
