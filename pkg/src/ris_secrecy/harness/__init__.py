"""Scenario configuration, benchmark schemes, Monte-Carlo runs and sweep output."""
from .config import (SCHEMES, WORKERS_ENV, ExperimentConfig, config_from_dict, load_config,
                     worker_count)
from .experiment import (AXES, InfeasibleSceneError, SchemeStats, SweepResult, SweepRow,
                         candidate_locations, clear_caches, config_at, run_scheme,
                         select_scheme_location, sweep)
from .output import HEADER, emit_csv, emit_gnuplot, read_csv

__all__ = ["SCHEMES", "WORKERS_ENV", "ExperimentConfig", "config_from_dict", "load_config",
           "worker_count", "AXES", "InfeasibleSceneError", "SchemeStats", "SweepResult",
           "SweepRow", "candidate_locations", "clear_caches", "config_at", "run_scheme",
           "select_scheme_location", "sweep", "HEADER", "emit_csv", "emit_gnuplot", "read_csv"]
