"""Sweeps, validation suite and CLI."""

from .config import (ConfigError, ExperimentConfig, SweepAxis, antenna_sweep_config,
                     db_to_linear, jamming_sweep_config, linear_to_db, load_config)
from .output import emit, read_csv, write_csv, write_json, write_plot_script
from .sweeps import SweepResult, SweepRow, run_sweep, run_sweep_antennas, run_sweep_jamming
from .validation import ValidationReport, run_validation
