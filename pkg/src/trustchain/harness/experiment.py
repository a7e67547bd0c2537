"""Parameter sweeps over seeds, with deterministic per-cell random streams."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..simulator import SimConfig, run_simulation
from .config import ConfigError, ExperimentSpec
from .io import fmt, write_metrics, write_run
from .metrics import metrics_report

log = logging.getLogger(__name__)


def derive_seed(base_seed: int, value_index: int, seed: int) -> int:
    """64-bit run seed hashed from the base seed, sweep position and replicate seed."""
    ss = np.random.SeedSequence([base_seed, value_index, seed])
    return int(ss.generate_state(1, np.uint64)[0])


def _cell_dir(out_dir: Path, param: Optional[str], value: Any, seed: int) -> Path:
    sub = out_dir if param is None else out_dir / f"{param}={fmt(value)}"
    return sub / f"seed={seed}"


def _run_cell(args) -> dict:
    param, vi, value, seed, cfg, out_dir = args
    run_seed = derive_seed(cfg.seed, vi, seed)
    result = run_simulation(replace(cfg, seed=run_seed))
    if out_dir is not None:
        write_run(result, _cell_dir(out_dir, param, value, seed))
    row = {"sweep_param": param, "sweep_value": value, "seed": seed, "run_seed": run_seed}
    row.update(metrics_report(result).as_row())
    return row


def run_experiment(spec: ExperimentSpec, out_dir: Optional[Path] = None, workers: int = 1) -> list[dict]:
    """Run every (sweep value, seed) cell and return one metrics row per cell.

    Rows are ordered by sweep value then seed, whatever ``workers`` is.  When
    an output directory is given (argument or ``spec.output_dir``) each cell
    writes its CSVs under ``<param>=<value>/seed=<seed>/`` and the combined
    table goes to ``metrics.csv``.
    """
    if not spec.seeds:
        raise ConfigError("sweep.seeds: must be non-empty")
    out_dir = Path(out_dir) if out_dir is not None else spec.output_dir
    jobs = [(spec.sweep_param, vi, value, seed, cfg, out_dir) for vi, value, seed, cfg in spec.cells()]
    log.info("running %d experiment cells", len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, jobs))
    else:
        rows = [_run_cell(job) for job in jobs]
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_metrics(rows, out_dir / "metrics.csv")
    return rows


def simulate_to_dir(config: SimConfig, out_dir: Path) -> dict:
    """Single run writing all four CSVs into ``out_dir``."""
    result = run_simulation(config)
    out_dir = Path(out_dir)
    write_run(result, out_dir)
    row = {"sweep_param": None, "sweep_value": None, "seed": config.seed, "run_seed": config.seed}
    row.update(metrics_report(result).as_row())
    write_metrics([row], out_dir / "metrics.csv")
    return row
