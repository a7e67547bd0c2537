"""Configuration, experiments, metrics and serialization."""

from .config import (
    ConfigError,
    ExperimentSpec,
    build_config,
    load_config,
    parse_config,
    serialize_config,
    with_value,
)
from .estimate import EstimateResult, HistoryError, estimate_trust, load_history, windowed_fractions
from .experiment import derive_seed, run_experiment, simulate_to_dir
from .io import write_run
from .metrics import MetricsReport, gini, metrics_report
