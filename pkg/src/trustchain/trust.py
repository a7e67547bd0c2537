"""Closed-form trust scores for validator nodes.

A node's trust is the posterior mean of a Beta-Bernoulli model over its
validation history:

    T = (N + a) / (N + M + a + b)

where N and M are (possibly fractional) counts of correct and incorrect
validations and Beta(a, b) is the prior.  With the Jeffreys prior
a = b = 0.5 this is the smoothed counting rule (N + 0.5) / (N + M + 1).

Time decay comes in two flavours:

- ``ema``: an exponential moving average ``T <- w*T + (1-w)*x`` where ``x``
  is either the latest behaviour bit (weight ``lam``) or the full-history
  Beta mean (weight ``gamma``).
- ``decayed_counts``: each observation is discounted by ``lam**age`` before
  entering the Beta update.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

DECAY_MODES = ("none", "ema", "decayed_counts")
EMA_INPUTS = ("behavior", "beta_mean")


@dataclass(frozen=True)
class BetaPrior:
    a: float = 0.5
    b: float = 0.5

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"prior a must be > 0, got {self.a}")
        if not self.b > 0:
            raise ValueError(f"prior b must be > 0, got {self.b}")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class DecayParams:
    """Time-decay settings.

    ``lam`` is the per-round retention used by the behaviour EMA and by
    decayed counts; ``gamma`` is the old-vs-new weight used when the EMA
    input is the full-history Beta mean.
    """

    mode: str = "none"
    lam: float = 0.9
    gamma: float = 0.9
    ema_input: str = "behavior"

    def __post_init__(self):
        if self.mode not in DECAY_MODES:
            raise ValueError(f"decay mode must be one of {DECAY_MODES}, got {self.mode!r}")
        if self.ema_input not in EMA_INPUTS:
            raise ValueError(f"ema_input must be one of {EMA_INPUTS}, got {self.ema_input!r}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"decay lambda must be in [0, 1], got {self.lam}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"decay gamma must be in [0, 1], got {self.gamma}")


@dataclass(frozen=True)
class ValidationRecord:
    round: int
    correct: bool
    confidence: float = 1.0

    def __post_init__(self):
        if self.round < 0:
            raise ValueError(f"round must be non-negative, got {self.round}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class TrustState:
    n_correct: float = 0.0
    m_incorrect: float = 0.0
    prior: BetaPrior = BetaPrior()
    ema_value: Optional[float] = None

    def __post_init__(self):
        if self.n_correct < 0 or self.m_incorrect < 0:
            raise ValueError("validation counts must be non-negative")

    @classmethod
    def fresh(cls, prior: BetaPrior, decay: Optional[DecayParams] = None) -> "TrustState":
        """Initial state for a node with no history."""
        ema = prior.mean if decay is not None and decay.mode == "ema" else None
        return cls(0.0, 0.0, prior, ema)


def beta_mean(n_correct: float, m_incorrect: float, prior: BetaPrior) -> float:
    return (n_correct + prior.a) / (n_correct + m_incorrect + prior.a + prior.b)


def trust_value(state: TrustState) -> float:
    """Beta posterior mean of the state's counts; always strictly inside (0, 1)."""
    return beta_mean(state.n_correct, state.m_incorrect, state.prior)


def current_trust(state: TrustState, decay: DecayParams) -> float:
    """Trust as reported under ``decay``: the EMA value in ema mode, else the Beta mean."""
    if decay.mode == "ema" and state.ema_value is not None:
        return state.ema_value
    return trust_value(state)


def record_outcome(state: TrustState, rec: ValidationRecord) -> TrustState:
    """Add one validation outcome, weighted by its confidence, to the counts."""
    if rec.confidence == 0.0:
        return state
    if rec.correct:
        return TrustState(state.n_correct + rec.confidence, state.m_incorrect, state.prior, state.ema_value)
    return TrustState(state.n_correct, state.m_incorrect + rec.confidence, state.prior, state.ema_value)


def decay_blend(old_value: float, new_value: float, weight: float) -> float:
    """Return ``weight*old_value + (1-weight)*new_value`` clamped to [0, 1]."""
    out = weight * old_value + (1.0 - weight) * new_value
    return min(1.0, max(0.0, out))


def decay_counts(state: TrustState, lam: float) -> TrustState:
    """Discount both counts by one round of retention ``lam``."""
    return replace(state, n_correct=state.n_correct * lam, m_incorrect=state.m_incorrect * lam)


def decayed_counts(history: Sequence[ValidationRecord], lam: float, now: int) -> tuple[float, float]:
    """Exponentially discounted (correct, incorrect) pseudo-counts at round ``now``.

    Each record contributes ``confidence * lam**(now - round)``.  Feeding the
    result into :func:`beta_mean` gives the time-decayed trust score.
    """
    n_eff = 0.0
    m_eff = 0.0
    prev = None
    for rec in history:
        if rec.round > now:
            raise ValueError(f"record at round {rec.round} is after now={now}")
        if prev is not None and rec.round < prev:
            raise ValueError("history must be sorted by round")
        prev = rec.round
        w = rec.confidence * lam ** (now - rec.round)
        if rec.correct:
            n_eff += w
        else:
            m_eff += w
    return n_eff, m_eff


def apply_validation(state: TrustState, rec: ValidationRecord, decay: DecayParams) -> TrustState:
    """Count ``rec`` and, in ema mode, advance the moving average.

    Decayed-count retention is per round rather than per observation, so it
    is applied separately via :func:`decay_counts`.
    """
    new = record_outcome(state, rec)
    if decay.mode != "ema":
        return new
    old = state.ema_value if state.ema_value is not None else state.prior.mean
    if decay.ema_input == "behavior":
        ema = decay_blend(old, 1.0 if rec.correct else 0.0, decay.lam)
    else:
        ema = decay_blend(old, trust_value(new), decay.gamma)
    return replace(new, ema_value=ema)


def trust_from_history(
    history: Iterable[ValidationRecord],
    prior: BetaPrior = BetaPrior(),
    lam: Optional[float] = None,
    now: Optional[int] = None,
) -> float:
    """Counting-rule trust for a whole history, optionally with decayed counts."""
    history = list(history)
    if lam is None:
        state = TrustState(prior=prior)
        for rec in history:
            state = record_outcome(state, rec)
        return trust_value(state)
    if now is None:
        now = history[-1].round if history else 0
    n_eff, m_eff = decayed_counts(history, lam, now)
    return beta_mean(n_eff, m_eff, prior)
