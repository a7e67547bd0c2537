"""Block-creator election, validator committees and the low-power lottery."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from itertools import accumulate
from typing import Hashable, Sequence

import numpy as np


@dataclass(frozen=True)
class NodeDescriptor:
    id: Hashable
    power: float
    honesty: float = 1.0

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError(f"node {self.id!r}: power must be > 0, got {self.power}")
        if not 0.0 <= self.honesty <= 1.0:
            raise ValueError(f"node {self.id!r}: honesty must be in [0, 1], got {self.honesty}")


@dataclass(frozen=True)
class SelectionWeights:
    creation: np.ndarray
    combined_raw: np.ndarray
    distribution: np.ndarray
    alpha: float

    @classmethod
    def from_distribution(cls, distribution: Sequence[float]) -> "SelectionWeights":
        """Wrap a bare probability vector, e.g. for testing :func:`select_creator`."""
        d = np.asarray(distribution, dtype=float)
        return cls(d, d, d, 1.0)


@dataclass(frozen=True)
class LotteryConfig:
    """Negative-binomial renewal schedule for low-power blocks.

    After K ~ NB(nb_successes, nb_success_prob) ordinary blocks, the next
    creator is drawn from the nodes at or below the ``low_power_quantile``
    of power.  ``uniform_within`` ignores trust inside a lottery block.
    """

    enabled: bool = False
    low_power_quantile: float = 0.5
    nb_successes: int = 1
    nb_success_prob: float = 0.5
    uniform_within: bool = False

    def __post_init__(self):
        if not 0.0 < self.low_power_quantile < 1.0:
            raise ValueError(f"low_power_quantile must be in (0, 1), got {self.low_power_quantile}")
        if int(self.nb_successes) != self.nb_successes or self.nb_successes < 1:
            raise ValueError(f"nb_successes must be a positive integer, got {self.nb_successes}")
        if not 0.0 < self.nb_success_prob <= 1.0:
            raise ValueError(f"nb_success_prob must be in (0, 1], got {self.nb_success_prob}")

    @property
    def expected_gap(self) -> float:
        p = self.nb_success_prob
        return self.nb_successes * (1.0 - p) / p

    @property
    def expected_share(self) -> float:
        """Long-run fraction of lottery blocks, 1 / (1 + E[K])."""
        return 1.0 / (1.0 + self.expected_gap)


@dataclass
class LotteryState:
    failures_remaining: int = 0


def creation_chance(powers: Sequence[float]) -> np.ndarray:
    """Power share of each node, P_i / sum(P)."""
    p = np.asarray(powers, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("powers must be a non-empty vector")
    if not np.all(p > 0):
        raise ValueError("all powers must be > 0")
    return p / p.sum()


def combined_chance(creation: Sequence[float], trust: Sequence[float], alpha: float) -> SelectionWeights:
    """Mix power share and trust as ``alpha*C + (1-alpha)*T``, then normalise."""
    c = np.asarray(creation, dtype=float)
    t = np.asarray(trust, dtype=float)
    if c.shape != t.shape or c.ndim != 1 or c.size == 0:
        raise ValueError("creation and trust must be equal-length non-empty vectors")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if c.min() < 0 or t.min() < 0:
        raise ValueError("creation and trust entries must be non-negative")
    c_total = c.sum()
    if abs(c_total - 1.0) > 1e-9:
        raise ValueError(f"creation chances must sum to 1, got {c_total}")
    raw = alpha * c + (1.0 - alpha) * t
    total = raw.sum()
    if not total > 0:
        raise ValueError("combined chances sum to zero; no node can be elected")
    # alpha = 1 is pure power share; dividing by its float sum would perturb it
    dist = c.copy() if alpha == 1.0 else raw / total
    return SelectionWeights(c, raw, dist, float(alpha))


def _pick(cdf: Sequence[float], u: float) -> int:
    # cdf[-1] is the total mass; zero-weight entries have empty intervals
    i = bisect.bisect_right(cdf, u * cdf[-1])
    n = len(cdf)
    if i >= n:
        # float rounding at the top end: take the last entry with mass
        i = n - 1
        while i > 0 and cdf[i] == cdf[i - 1]:
            i -= 1
    return i


def _check_distribution(d: np.ndarray) -> None:
    if d.ndim != 1 or d.size == 0:
        raise ValueError("distribution must be a non-empty vector")
    if d.min() < 0 or not d.sum() > 0:
        raise ValueError("distribution must be non-negative with positive mass")


def select_creator(weights: SelectionWeights, rng: np.random.Generator) -> int:
    """Index of the elected creator, drawn with probability ``distribution[i]``."""
    d = np.asarray(weights.distribution, dtype=float)
    _check_distribution(d)
    return _pick(list(accumulate(d.tolist())), rng.random())


def sample_creators(weights: SelectionWeights, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorised equivalent of ``size`` independent :func:`select_creator` draws."""
    d = np.asarray(weights.distribution, dtype=float)
    _check_distribution(d)
    cdf = np.cumsum(d)
    idx = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
    last = int(np.flatnonzero(d > 0)[-1])
    return np.minimum(idx, last)


def select_validators(
    nodes: Sequence[NodeDescriptor],
    creator: Hashable,
    k: int,
    rng: np.random.Generator,
) -> list:
    """Power-weighted committee of ``min(k, n-1)`` distinct non-creator ids.

    Members are drawn one at a time without replacement, each draw
    proportional to power among the nodes not yet chosen.
    """
    if k < 1:
        raise ValueError(f"committee size must be >= 1, got {k}")
    if len(nodes) < 2:
        raise ValueError("need at least 2 nodes to form a committee")
    pool = [n for n in nodes if n.id != creator]
    weights = [n.power for n in pool]
    committee = []
    for _ in range(min(k, len(pool))):
        i = _pick(list(accumulate(weights)), rng.random())
        committee.append(pool[i].id)
        weights[i] = 0.0
    return committee


def draw_lottery_gap(cfg: LotteryConfig, rng: np.random.Generator) -> int:
    """Number of ordinary blocks before the next lottery block, K ~ NB(r, p)."""
    if not 0.0 < cfg.nb_success_prob <= 1.0:
        raise ValueError(f"nb_success_prob must be in (0, 1], got {cfg.nb_success_prob}")
    return int(rng.negative_binomial(cfg.nb_successes, cfg.nb_success_prob))


def low_power_mask(powers: Sequence[float], quantile: float) -> np.ndarray:
    """Nodes whose power is at or below the empirical ``quantile`` of all powers."""
    p = np.asarray(powers, dtype=float)
    return p <= np.quantile(p, quantile)


def next_creator(
    weights: SelectionWeights,
    nodes: Sequence[NodeDescriptor],
    lottery: LotteryConfig,
    state: LotteryState,
    rng: np.random.Generator,
) -> tuple[int, bool, LotteryState]:
    """Elect the next creator, diverting to the low-power set when the lottery is due.

    Returns ``(index, is_lottery_block, new_state)``.  With the lottery
    disabled this is exactly :func:`select_creator`.
    """
    if not lottery.enabled:
        return select_creator(weights, rng), False, state
    if state.failures_remaining > 0:
        idx = select_creator(weights, rng)
        return idx, False, LotteryState(state.failures_remaining - 1)

    mask = low_power_mask([n.power for n in nodes], lottery.low_power_quantile)
    if not mask.any():
        raise ValueError("lottery enabled but the low-power set is empty")
    if lottery.uniform_within:
        sub = mask.astype(float)
    else:
        sub = np.where(mask, weights.distribution, 0.0)
        if not sub.sum() > 0:
            sub = mask.astype(float)
    idx = _pick(list(accumulate(sub.tolist())), rng.random())
    return idx, True, LotteryState(draw_lottery_gap(lottery, rng))
