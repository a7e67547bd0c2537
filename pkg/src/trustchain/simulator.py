"""Discrete-round simulation of trust-weighted block production.

Each round elects a creator, draws the block's true validity from the
creator's honesty, polls a power-weighted committee, adjudicates by strict
majority and updates every validator's trust.  One seeded numpy Generator
drives a whole run, so identical configs give identical results.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Hashable, Optional, Sequence

import numpy as np

from .consensus import (
    LotteryConfig,
    LotteryState,
    NodeDescriptor,
    combined_chance,
    creation_chance,
    draw_lottery_gap,
    next_creator,
    select_validators,
)
from .trust import (
    BetaPrior,
    DecayParams,
    TrustState,
    ValidationRecord,
    apply_validation,
    current_trust,
    decay_counts,
)

log = logging.getLogger(__name__)

TRUTH_MODES = ("oracle", "majority")
BEHAVIOR_MODES = ("independent_honesty", "power_as_honesty")


@dataclass(frozen=True)
class SimConfig:
    nodes: tuple[NodeDescriptor, ...]
    alpha: float = 0.5
    prior: BetaPrior = BetaPrior()
    decay: DecayParams = DecayParams()
    committee_size: int = 3
    lottery: LotteryConfig = LotteryConfig()
    truth_mode: str = "oracle"
    behavior_mode: str = "independent_honesty"
    rounds: int = 100
    block_reward: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        self.validate()

    def validate(self) -> None:
        if len(self.nodes) < 2:
            raise ValueError(f"nodes: need at least 2 nodes, got {len(self.nodes)}")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("nodes: ids must be unique")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha: must be in [0, 1], got {self.alpha}")
        if self.committee_size < 1:
            raise ValueError(f"committee_size: must be >= 1, got {self.committee_size}")
        if self.truth_mode not in TRUTH_MODES:
            raise ValueError(f"truth_mode: must be one of {TRUTH_MODES}, got {self.truth_mode!r}")
        if self.behavior_mode not in BEHAVIOR_MODES:
            raise ValueError(f"behavior_mode: must be one of {BEHAVIOR_MODES}, got {self.behavior_mode!r}")
        if self.behavior_mode == "power_as_honesty" and any(n.power > 1.0 for n in self.nodes):
            raise ValueError("nodes.power: power_as_honesty requires every power in (0, 1]")
        if self.rounds < 1:
            raise ValueError(f"rounds: must be >= 1, got {self.rounds}")
        if not self.block_reward > 0:
            raise ValueError(f"block_reward: must be > 0, got {self.block_reward}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed: must be a 64-bit unsigned integer, got {self.seed}")

    def honesty(self, node: NodeDescriptor) -> float:
        """Probability that ``node`` acts correctly under the behaviour mode."""
        return node.power if self.behavior_mode == "power_as_honesty" else node.honesty


@dataclass(frozen=True)
class Block:
    round: int
    creator: Hashable
    is_lottery: bool
    ground_truth_valid: bool


@dataclass(frozen=True)
class ValidationEvent:
    validator: Hashable
    vote: bool
    matched_truth: bool
    credited_correct: bool


@dataclass(frozen=True)
class RoundOutcome:
    block: Block
    events: tuple[ValidationEvent, ...]
    accepted: bool
    reward_paid: float

    @property
    def committee(self) -> list:
        return [e.validator for e in self.events]


@dataclass
class NetworkState:
    """Mutable per-run state advanced by :func:`run_round`."""

    states: list[TrustState]
    lottery: LotteryState
    rewards: list[float]
    round: int = 0
    # per-run constants, derived from the config
    creation: np.ndarray = field(default_factory=lambda: np.zeros(0))
    index: dict = field(default_factory=dict)
    trust: list[float] = field(default_factory=list)

    @classmethod
    def initial(cls, config: SimConfig, rng: np.random.Generator) -> "NetworkState":
        fresh = TrustState.fresh(config.prior, config.decay)
        gap = draw_lottery_gap(config.lottery, rng) if config.lottery.enabled else 0
        n = len(config.nodes)
        return cls(
            [fresh] * n,
            LotteryState(gap),
            [0.0] * n,
            creation=creation_chance([node.power for node in config.nodes]),
            index={node.id: i for i, node in enumerate(config.nodes)},
            trust=[current_trust(fresh, config.decay)] * n,
        )

    def trust_values(self, decay: DecayParams) -> list[float]:
        return [current_trust(s, decay) for s in self.states]


@dataclass
class SimResult:
    config: SimConfig
    outcomes: list[RoundOutcome]
    trust_trajectories: np.ndarray  # (rounds, n_nodes), trust after each round
    rewards: np.ndarray
    final_states: list[TrustState]

    @property
    def node_ids(self) -> list:
        return [n.id for n in self.config.nodes]

    def final_trust(self) -> np.ndarray:
        return self.trust_trajectories[-1]

    def blocks_created(self) -> np.ndarray:
        index = {nid: i for i, nid in enumerate(self.node_ids)}
        counts = np.zeros(len(index), dtype=np.int64)
        for o in self.outcomes:
            counts[index[o.block.creator]] += 1
        return counts

    def blocks_accepted(self) -> np.ndarray:
        index = {nid: i for i, nid in enumerate(self.node_ids)}
        counts = np.zeros(len(index), dtype=np.int64)
        for o in self.outcomes:
            if o.accepted:
                counts[index[o.block.creator]] += 1
        return counts


def adjudicate(votes: Sequence[bool]) -> bool:
    """Accept iff strictly more votes say valid than invalid."""
    if len(votes) == 0:
        raise ValueError("cannot adjudicate an empty vote list")
    valid = sum(1 for v in votes if v)
    return valid > len(votes) - valid


def run_round(config: SimConfig, state: NetworkState, rng: np.random.Generator) -> RoundOutcome:
    """Play one round and update ``state`` in place."""
    nodes = config.nodes
    decay = config.decay
    t = state.round

    weights = combined_chance(state.creation, state.trust, config.alpha)
    idx, is_lottery, state.lottery = next_creator(weights, nodes, config.lottery, state.lottery, rng)
    creator = nodes[idx]
    truth = bool(rng.random() < config.honesty(creator))
    block = Block(t, creator.id, is_lottery, truth)

    committee = select_validators(nodes, creator.id, config.committee_size, rng)
    index = state.index
    votes = []
    for vid in committee:
        honest = rng.random() < config.honesty(nodes[index[vid]])
        votes.append(truth if honest else not truth)
    accepted = adjudicate(votes)

    if decay.mode == "decayed_counts":
        state.states = [decay_counts(s, decay.lam) for s in state.states]
        state.trust = state.trust_values(decay)
    events = []
    for vid, vote in zip(committee, votes):
        matched = vote == truth
        credited = matched if config.truth_mode == "oracle" else vote == accepted
        i = index[vid]
        state.states[i] = apply_validation(state.states[i], ValidationRecord(t, credited), decay)
        state.trust[i] = current_trust(state.states[i], decay)
        events.append(ValidationEvent(vid, vote, matched, credited))

    reward = config.block_reward if accepted else 0.0
    state.rewards[idx] += reward
    state.round += 1
    return RoundOutcome(block, tuple(events), accepted, reward)


def run_simulation(config: SimConfig, rng: Optional[np.random.Generator] = None) -> SimResult:
    """Run ``config.rounds`` rounds from fresh trust states.

    The random stream is ``numpy.random.default_rng(config.seed)`` (PCG64)
    unless one is supplied.
    """
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    state = NetworkState.initial(config, rng)
    n = len(config.nodes)
    trajectories = np.empty((config.rounds, n))
    outcomes = []
    for r in range(config.rounds):
        outcomes.append(run_round(config, state, rng))
        trajectories[r] = state.trust
    log.debug("simulated %d rounds over %d nodes", config.rounds, n)
    return SimResult(config, outcomes, trajectories, np.asarray(state.rewards), list(state.states))


def scenario_sybil_split(base: SimConfig, target: Hashable, k_identities: int) -> SimConfig:
    """Replace ``target`` by ``k_identities`` clones, each with 1/k of its power.

    Clone ids are ``f"{target}#{j}"`` and take the target's position in the
    node list.
    """
    if k_identities < 2:
        raise ValueError(f"k_identities must be >= 2, got {k_identities}")
    ids = [n.id for n in base.nodes]
    if target not in ids:
        raise ValueError(f"unknown node id {target!r}")
    nodes = []
    for n in base.nodes:
        if n.id == target:
            share = n.power / k_identities
            nodes.extend(NodeDescriptor(f"{target}#{j}", share, n.honesty) for j in range(k_identities))
        else:
            nodes.append(n)
    return replace(base, nodes=tuple(nodes))


def sybil_ids(config: SimConfig, target: Hashable) -> list:
    """Ids in ``config`` controlled by ``target`` (itself, or its split clones)."""
    prefix = f"{target}#"
    return [n.id for n in config.nodes if n.id == target or str(n.id).startswith(prefix)]


def appendix_config(seed: int, n_nodes: int = 10, rounds: int = 100, alpha: float = 0.5, **overrides) -> SimConfig:
    """Toy network with uniform random powers that double as honesty.

    Every non-creator validates each block (committee of n - 1), mirroring a
    fully connected validation loop.
    """
    rng = np.random.default_rng(seed)
    powers = 1.0 - rng.random(n_nodes)  # (0, 1]
    nodes = tuple(NodeDescriptor(i, float(p), float(p)) for i, p in enumerate(powers))
    kwargs = dict(
        alpha=alpha,
        committee_size=n_nodes - 1,
        behavior_mode="power_as_honesty",
        rounds=rounds,
        seed=seed,
    )
    kwargs.update(overrides)
    return SimConfig(nodes, **kwargs)
