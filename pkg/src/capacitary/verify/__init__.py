"""Inequality verification harness: generators, the check registry, reports."""

from .checks import CHECKS, CheckSpec, LevelClaim, desk_config, get_check
from .config import CheckConfig, ConfigError, config_from_mapping, read_config_file
from .generators import fourier_witness, gen_functions
from .harness import PROFILES, estimate_operator_norm, maximize_ratio, run_check, run_suite
from .report import CheckReport, ClaimResult, summary_csv, write_outputs

__all__ = [
    "CHECKS", "CheckConfig", "CheckReport", "CheckSpec", "ClaimResult", "ConfigError", "LevelClaim", "PROFILES",
    "config_from_mapping", "desk_config", "estimate_operator_norm", "fourier_witness", "gen_functions",
    "get_check", "maximize_ratio", "read_config_file", "run_check", "run_suite", "summary_csv", "write_outputs",
]
