"""Trust estimation from a recorded validation history.

A history CSV has a header and columns ``round, correct[, confidence]``;
``correct`` accepts 1/0 or true/false and confidence defaults to 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import betaincinv

from ..mcmc import (
    ChainConfig,
    GaussianModel,
    PosteriorSummary,
    gibbs_gaussian_chain,
    mh_trust_chain,
    run_chains,
    summarize,
)
from ..trust import BetaPrior, ValidationRecord, beta_mean, decayed_counts

METHODS = ("counting", "mh", "gibbs")


class HistoryError(ValueError):
    """A history file is malformed or too short for the requested method."""


@dataclass(frozen=True)
class EstimateResult:
    method: str
    trust: float
    summary: PosteriorSummary
    n_records: int
    acceptance_rate: Optional[float] = None
    rhat: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "method": self.method,
            "trust": self.trust,
            "mean": self.summary.mean,
            "median": self.summary.median,
            "std": self.summary.std,
            "n_records": self.n_records,
            "acceptance_rate": self.acceptance_rate,
            "rhat": self.rhat,
        }
        out.update(self.extra)
        return out


_TRUE = {"1", "true", "t", "yes"}
_FALSE = {"0", "false", "f", "no"}


def load_history(path: Union[str, Path]) -> list[ValidationRecord]:
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise HistoryError(f"cannot read history {path}: {exc.strerror}") from None
    records = []
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"round", "correct"} <= set(reader.fieldnames):
            raise HistoryError(f"{path}: header must include 'round' and 'correct'")
        for lineno, row in enumerate(reader, 2):
            try:
                correct_text = row["correct"].strip().lower()
                if correct_text in _TRUE:
                    correct = True
                elif correct_text in _FALSE:
                    correct = False
                else:
                    raise ValueError(f"bad correct value {row['correct']!r}")
                conf_text = (row.get("confidence") or "").strip()
                confidence = float(conf_text) if conf_text else 1.0
                records.append(ValidationRecord(int(row["round"]), correct, confidence))
            except (ValueError, TypeError, AttributeError) as exc:
                raise HistoryError(f"{path}, line {lineno}: {exc}") from None
    rounds = [r.round for r in records]
    if rounds != sorted(rounds):
        raise HistoryError(f"{path}: rows must be sorted by round")
    return records


def weighted_counts(history: Sequence[ValidationRecord]) -> tuple[float, float]:
    n = sum(r.confidence for r in history if r.correct)
    m = sum(r.confidence for r in history if not r.correct)
    return n, m


def windowed_fractions(history: Sequence[ValidationRecord], window: int) -> list[float]:
    """Fraction correct in each consecutive, non-overlapping block of ``window`` records.

    A trailing partial window is dropped.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    full = len(history) // window
    return [
        sum(1 for r in history[i * window:(i + 1) * window] if r.correct) / window
        for i in range(full)
    ]


def _beta_summary(n: float, m: float, prior: BetaPrior) -> PosteriorSummary:
    a, b = n + prior.a, m + prior.b
    var = a * b / ((a + b) ** 2 * (a + b + 1))
    return PosteriorSummary(beta_mean(n, m, prior), float(betaincinv(a, b, 0.5)), math.sqrt(var))


def estimate_trust(
    history: Sequence[ValidationRecord],
    method: str = "counting",
    prior: BetaPrior = BetaPrior(),
    steps: int = 55_000,
    burn_in: Optional[int] = None,
    proposal_std: float = 0.3,
    seed: int = 0,
    window: int = 10,
    decay_lambda: Optional[float] = None,
    hyper: GaussianModel = GaussianModel(),
    n_chains: int = 1,
) -> EstimateResult:
    """Estimate a node's trust with the closed form, trust-space MH or Gibbs.

    ``counting`` is the Beta posterior of the (optionally decayed) counts.
    ``mh`` samples the same posterior.  ``gibbs`` fits the Gaussian model to
    per-window correctness fractions and reports the posterior mean of mu,
    clamped to [0, 1].  With ``n_chains >= 2`` the MCMC methods also report
    split-R-hat.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    history = list(history)

    if method == "counting":
        if decay_lambda is None:
            n, m = weighted_counts(history)
        else:
            now = history[-1].round if history else 0
            n, m = decayed_counts(history, decay_lambda, now)
        summary = _beta_summary(n, m, prior)
        return EstimateResult(method, summary.mean, summary, len(history))

    cfg = ChainConfig(steps=steps, burn_in=burn_in, proposal_std=proposal_std, seed=seed)
    if method == "mh":
        n, m = weighted_counts(history)
        args, sampler, kwargs = (n, m), mh_trust_chain, {"prior": prior}
    else:
        if len(history) < window:
            raise HistoryError(f"gibbs needs at least one full window of {window} rounds, got {len(history)}")
        args, sampler, kwargs = (windowed_fractions(history, window),), gibbs_gaussian_chain, {"hyper": hyper}

    if n_chains >= 2:
        chains = run_chains(sampler, *args, cfg=cfg, n_chains=n_chains, **kwargs)
        pooled = np.concatenate([c.first for c in chains])
        summary = PosteriorSummary(
            float(pooled.mean()), float(np.median(pooled)), float(np.std(pooled, ddof=1))
        )
        acceptance = float(np.mean([c.diagnostics.acceptance_rate for c in chains]))
        rhat = chains[0].diagnostics.rhat
    else:
        chain = sampler(*args, cfg=cfg, **kwargs)
        summary = summarize(chain)
        acceptance, rhat = chain.diagnostics.acceptance_rate, None

    trust = summary.mean if method == "mh" else min(1.0, max(0.0, summary.mean))
    return EstimateResult(method, trust, summary, len(history), acceptance, rhat)
