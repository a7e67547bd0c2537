"""CSV writers for simulation output.

Every float is written with 12 significant digits and every file uses ``\\n``
line endings, so repeated runs of one config produce identical bytes.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from ..simulator import SimResult

ROUNDS_COLUMNS = ("round", "creator_id", "is_lottery", "ground_truth_valid", "accepted", "committee", "votes")
TRUST_COLUMNS = ("round", "node_id", "trust_value")
SUMMARY_COLUMNS = (
    "node_id",
    "power",
    "honesty",
    "blocks_created",
    "blocks_accepted",
    "reward",
    "final_trust",
)
METRICS_COLUMNS = (
    "sweep_param",
    "sweep_value",
    "seed",
    "run_seed",
    "gini",
    "low_power_share",
    "acceptance_rate",
    "trust_mae",
)


def fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.12g}"
    if hasattr(value, "item"):  # numpy scalar
        return fmt(value.item())
    return str(value)


def _write(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_rounds(result: SimResult, path: Path) -> None:
    rows = (
        (
            o.block.round,
            o.block.creator,
            o.block.is_lottery,
            o.block.ground_truth_valid,
            o.accepted,
            ";".join(str(e.validator) for e in o.events),
            ";".join("1" if e.vote else "0" for e in o.events),
        )
        for o in result.outcomes
    )
    _write(path, ROUNDS_COLUMNS, rows)


def write_trust(result: SimResult, path: Path) -> None:
    ids = result.node_ids
    traj = result.trust_trajectories.tolist()
    rows = ((r, nid, value) for r, row in enumerate(traj) for nid, value in zip(ids, row))
    _write(path, TRUST_COLUMNS, rows)


def write_summary(result: SimResult, path: Path) -> None:
    cfg = result.config
    created = result.blocks_created().tolist()
    accepted = result.blocks_accepted().tolist()
    rewards = result.rewards.tolist()
    final = result.final_trust().tolist()
    rows = (
        (n.id, n.power, cfg.honesty(n), created[i], accepted[i], rewards[i], final[i])
        for i, n in enumerate(cfg.nodes)
    )
    _write(path, SUMMARY_COLUMNS, rows)


def write_metrics(rows: Iterable[Mapping[str, Any]], path: Path) -> None:
    _write(path, METRICS_COLUMNS, ([row.get(c) for c in METRICS_COLUMNS] for row in rows))


def write_run(result: SimResult, out_dir: Path) -> None:
    """Write rounds.csv, trust.csv and summary.csv for one run."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc.strerror}") from exc
    write_rounds(result, out_dir / "rounds.csv")
    write_trust(result, out_dir / "trust.csv")
    write_summary(result, out_dir / "summary.csv")
