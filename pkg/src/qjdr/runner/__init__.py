"""Sweep orchestration, configuration and output writers."""

from .config import DiscriminationConfig, SweepConfig, load_config, parse_config
from .output import CSV_COLUMNS, emit_csv, emit_plot, parse_csv, read_csv
from .sweep import SweepFailed, SweepRow, run_sweep

__all__ = [
    "CSV_COLUMNS",
    "DiscriminationConfig",
    "SweepConfig",
    "SweepFailed",
    "SweepRow",
    "emit_csv",
    "emit_plot",
    "load_config",
    "parse_config",
    "parse_csv",
    "read_csv",
    "run_sweep",
]
