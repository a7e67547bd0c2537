"""Run-level metrics: reward inequality, low-power share, acceptance, calibration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..consensus import low_power_mask
from ..simulator import SimResult


@dataclass(frozen=True)
class MetricsReport:
    gini: float
    low_power_share: float
    acceptance_rate: float
    trust_mae: float  # NaN outside oracle mode

    FIELDS = ("gini", "low_power_share", "acceptance_rate", "trust_mae")

    def as_row(self) -> dict[str, float]:
        return {f: getattr(self, f) for f in self.FIELDS}


def gini(rewards: Sequence[float]) -> float:
    """Gini coefficient, ``sum |x_i - x_j| / (2 n^2 mean)``."""
    x = np.asarray(rewards, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("gini needs a non-empty reward vector")
    if np.any(x < 0):
        raise ValueError("rewards must be non-negative")
    total = x.sum()
    if total <= 0:
        raise ValueError("gini is undefined when every reward is zero")
    # sorted form of the mean absolute difference, O(n log n)
    xs = np.sort(x)
    n = xs.size
    ranks = np.arange(1, n + 1)
    g = float(np.sum((2 * ranks - n - 1) * xs) / (n * total))
    return min(1.0, max(0.0, g))  # rounding can push equal rewards just below 0


def metrics_report(result: SimResult) -> MetricsReport:
    cfg = result.config
    rounds = len(result.outcomes)
    try:
        g = gini(result.rewards)
    except ValueError:
        g = math.nan

    low = low_power_mask([n.power for n in cfg.nodes], cfg.lottery.low_power_quantile)
    created = result.blocks_created()
    low_share = float(created[low].sum() / rounds)
    accept = sum(1 for o in result.outcomes if o.accepted) / rounds

    if cfg.truth_mode == "oracle":
        honesty = np.array([cfg.honesty(n) for n in cfg.nodes])
        mae = float(np.mean(np.abs(result.final_trust() - honesty)))
    else:
        mae = math.nan
    return MetricsReport(g, low_share, accept, mae)
