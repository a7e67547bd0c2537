"""MCMC estimators for a node's trust posterior.

Three samplers are provided:

- :func:`mh_trust_chain` -- random-walk Metropolis-Hastings directly on the
  trust value T in (0, 1), targeting the Beta-Bernoulli posterior.
- :func:`mh_gaussian_chain` -- random-walk MH over (mu, log sigma) of a
  Gaussian model for continuous correctness observations.
- :func:`gibbs_gaussian_chain` -- exact-conditional Gibbs sampling under the
  Normal-Inverse-Gamma conjugate model.

Chains are summarised with :func:`summarize` and checked for convergence with
:func:`split_rhat`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, TextIO

import numpy as np

from .trust import BetaPrior


class DegenerateLikelihoodError(ValueError):
    """The observations cannot define a proper Gaussian likelihood."""


@dataclass(frozen=True)
class ChainConfig:
    """Iteration budget and proposal scale for one chain.

    ``burn_in`` defaults to 10% of ``steps``.  Retained samples are the
    states after iterations ``burn_in + thin - 1``, ``burn_in + 2*thin - 1``,
    ... so a chain keeps ``(steps - burn_in) // thin`` samples.
    """

    steps: int = 55_000
    burn_in: Optional[int] = None
    thin: int = 1
    proposal_std: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.steps // 10)
        if self.steps < 1:
            raise ValueError(f"steps must be positive, got {self.steps}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be non-negative, got {self.burn_in}")
        if self.steps <= self.burn_in:
            raise ValueError(f"steps ({self.steps}) must exceed burn_in ({self.burn_in})")
        if self.thin < 1:
            raise ValueError(f"thin must be >= 1, got {self.thin}")
        if not self.proposal_std > 0:
            raise ValueError(f"proposal_std must be > 0, got {self.proposal_std}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def n_kept(self) -> int:
        return (self.steps - self.burn_in) // self.thin

    def kept_iterations(self) -> np.ndarray:
        return np.arange(self.burn_in + self.thin - 1, self.steps, self.thin)[: self.n_kept]


@dataclass(frozen=True)
class GaussianModel:
    """Normal-Inverse-Gamma hyperparameters.

    mu | sigma2 ~ Normal(mu0, sigma2 / kappa0), sigma2 ~ InvGamma(alpha0, beta0).
    """

    mu0: float = 0.5
    kappa0: float = 1.0
    alpha0: float = 2.0
    beta0: float = 0.05

    def __post_init__(self):
        for name in ("kappa0", "alpha0", "beta0"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value}")
        if not math.isfinite(self.mu0):
            raise ValueError(f"mu0 must be finite, got {self.mu0}")


@dataclass(frozen=True)
class ChainDiagnostics:
    acceptance_rate: float
    rhat: Optional[float] = None


@dataclass(frozen=True)
class Chain:
    samples: np.ndarray
    diagnostics: ChainDiagnostics
    iterations: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def first(self) -> np.ndarray:
        """The leading coordinate: T for trust chains, mu for Gaussian chains."""
        return self.samples if self.samples.ndim == 1 else self.samples[:, 0]


@dataclass(frozen=True)
class PosteriorSummary:
    mean: float
    median: float
    std: float


def _rng(cfg: ChainConfig) -> np.random.Generator:
    return np.random.default_rng(cfg.seed)


def _accept(log_target_ratio: float, log_q_ratio: float, u: float) -> bool:
    # alpha = min(1, P(cand)/P(cur) * Q(cur|cand)/Q(cand|cur)); accept iff u < alpha
    log_alpha = log_target_ratio + log_q_ratio
    return log_alpha >= 0.0 or (u > 0.0 and math.log(u) < log_alpha)


def beta_log_density(t: float, n_correct: float, m_incorrect: float, prior: BetaPrior) -> float:
    """Unnormalised log posterior of T; ``-inf`` outside (0, 1)."""
    if not 0.0 < t < 1.0:
        return -math.inf
    return (n_correct + prior.a - 1.0) * math.log(t) + (m_incorrect + prior.b - 1.0) * math.log1p(-t)


def mh_trust_chain(
    n_correct: float,
    m_incorrect: float,
    prior: BetaPrior = BetaPrior(),
    cfg: ChainConfig = ChainConfig(),
) -> Chain:
    """Random-walk Metropolis-Hastings on T targeting Beta(N + a, M + b).

    The chain starts at the prior mean.  Gaussian proposals are symmetric so
    the proposal ratio is zero on the log scale; candidates outside (0, 1)
    have zero density and are always rejected.
    """
    if n_correct < 0 or m_incorrect < 0:
        raise ValueError("validation counts must be non-negative")
    rng = _rng(cfg)
    steps = cfg.steps
    noise = rng.standard_normal(steps) * cfg.proposal_std
    uniforms = rng.random(steps)
    alpha_n = n_correct + prior.a - 1.0
    beta_m = m_incorrect + prior.b - 1.0
    log, log1p = math.log, math.log1p

    cur = prior.mean
    cur_lp = alpha_n * log(cur) + beta_m * log1p(-cur)
    trace = np.empty(steps)
    accepted = 0
    for i, (step, u) in enumerate(zip(noise.tolist(), uniforms.tolist())):
        cand = cur + step
        if 0.0 < cand < 1.0:
            cand_lp = alpha_n * log(cand) + beta_m * log1p(-cand)
            if _accept(cand_lp - cur_lp, 0.0, u):
                cur, cur_lp = cand, cand_lp
                accepted += 1
        trace[i] = cur

    idx = cfg.kept_iterations()
    return Chain(trace[idx], ChainDiagnostics(accepted / steps), idx)


def _check_observations(observations: Sequence[float]) -> np.ndarray:
    y = np.asarray(observations, dtype=float)
    if y.ndim != 1:
        raise ValueError("observations must be a flat sequence")
    if not np.all(np.isfinite(y)):
        raise ValueError("observations must be finite")
    return y


def mh_gaussian_chain(observations: Sequence[float], cfg: ChainConfig = ChainConfig()) -> Chain:
    """Random-walk MH over (mu, log sigma) with flat priors on both.

    Samples are returned as ``(mu, sigma**2)`` pairs.  The proposal step
    ``cfg.proposal_std`` is shared by both coordinates.
    """
    y = _check_observations(observations)
    n = len(y)
    if n < 2:
        raise DegenerateLikelihoodError(f"need at least 2 observations, got {n}")
    ybar = float(y.mean())
    ss = float(((y - ybar) ** 2).sum())
    if ss <= 0.0:
        raise DegenerateLikelihoodError("observations have zero sample variance")

    def log_lik(mu: float, log_sigma: float) -> float:
        # Gaussian log likelihood up to a constant, via sufficient statistics
        return -n * log_sigma - (ss + n * (ybar - mu) ** 2) * 0.5 * math.exp(-2.0 * log_sigma)

    rng = _rng(cfg)
    steps = cfg.steps
    noise = rng.standard_normal((steps, 2)) * cfg.proposal_std
    uniforms = rng.random(steps)

    mu = ybar
    log_sigma = 0.5 * math.log(ss / (n - 1))
    cur_ll = log_lik(mu, log_sigma)
    trace = np.empty((steps, 2))
    accepted = 0
    for i, ((d_mu, d_ls), u) in enumerate(zip(noise.tolist(), uniforms.tolist())):
        cand_mu, cand_ls = mu + d_mu, log_sigma + d_ls
        cand_ll = log_lik(cand_mu, cand_ls)
        if _accept(cand_ll - cur_ll, 0.0, u):
            mu, log_sigma, cur_ll = cand_mu, cand_ls, cand_ll
            accepted += 1
        trace[i, 0] = mu
        trace[i, 1] = math.exp(2.0 * log_sigma)

    idx = cfg.kept_iterations()
    return Chain(trace[idx], ChainDiagnostics(accepted / steps), idx)


def gibbs_gaussian_chain(
    observations: Sequence[float],
    hyper: GaussianModel = GaussianModel(),
    cfg: ChainConfig = ChainConfig(),
) -> Chain:
    """Gibbs sampler for (mu, sigma2) under the Normal-Inverse-Gamma model.

    Each sweep draws

        mu | sigma2, y  ~ Normal((kappa0*mu0 + n*ybar) / (kappa0 + n), sigma2 / (kappa0 + n))
        sigma2 | mu, y  ~ InvGamma(alpha0 + (n + 1)/2,
                                   beta0 + (sum (y - mu)^2 + kappa0*(mu - mu0)^2) / 2)

    With no observations the chain samples the prior.  ``cfg.proposal_std``
    is unused since every draw is exact.
    """
    y = _check_observations(observations)
    n = len(y)
    ybar = float(y.mean()) if n else 0.0
    ss = float(((y - ybar) ** 2).sum()) if n else 0.0
    kappa_n = hyper.kappa0 + n
    mu_n = (hyper.kappa0 * hyper.mu0 + n * ybar) / kappa_n
    shape = hyper.alpha0 + 0.5 * (n + 1)

    rng = _rng(cfg)
    steps = cfg.steps
    z = rng.standard_normal(steps)
    g = rng.standard_gamma(shape, steps)

    sigma2 = ss / (n - 1) if n >= 2 and ss > 0 else hyper.beta0 / (hyper.alpha0 + 1.0)
    trace = np.empty((steps, 2))
    kappa0, mu0, beta0 = hyper.kappa0, hyper.mu0, hyper.beta0
    for i, (zi, gi) in enumerate(zip(z.tolist(), g.tolist())):
        mu = mu_n + zi * math.sqrt(sigma2 / kappa_n)
        dev = ss + n * (ybar - mu) ** 2
        rate = beta0 + 0.5 * (dev + kappa0 * (mu - mu0) ** 2)
        sigma2 = rate / gi
        trace[i, 0] = mu
        trace[i, 1] = sigma2

    idx = cfg.kept_iterations()
    return Chain(trace[idx], ChainDiagnostics(1.0), idx)


def summarize(chain: Chain) -> PosteriorSummary:
    """Mean, median and sample standard deviation of the leading coordinate."""
    x = chain.first
    if len(x) == 0:
        raise ValueError("cannot summarize an empty chain")
    std = float(np.std(x, ddof=1)) if len(x) > 1 else 0.0
    return PosteriorSummary(float(np.mean(x)), float(np.median(x)), std)


def split_rhat(chains: Sequence[Chain | np.ndarray]) -> float:
    """Split-R-hat over several chains; the max over coordinates.

    Each chain is cut into two halves (the middle draw is dropped for odd
    lengths) and the classic potential scale reduction is computed across
    the halves.  Returns ``inf`` when within-chain variance is zero but the
    chains disagree.
    """
    arrays = [np.asarray(c.samples if isinstance(c, Chain) else c, dtype=float) for c in chains]
    if len(arrays) < 2:
        raise ValueError(f"split_rhat needs at least 2 chains, got {len(arrays)}")
    length = len(arrays[0])
    if any(len(a) != length for a in arrays):
        raise ValueError("all chains must have the same length")
    if length < 4:
        raise ValueError(f"chains must have at least 4 samples, got {length}")

    half = length // 2
    parts = []
    for a in arrays:
        a = a.reshape(length, -1)
        parts.append(a[:half])
        parts.append(a[length - half:])
    stacked = np.stack(parts)  # (m, half, dims)

    means = stacked.mean(axis=1)
    w = stacked.var(axis=1, ddof=1).mean(axis=0)
    b = half * means.var(axis=0, ddof=1)
    worst = 0.0
    for wi, bi in zip(w.tolist(), b.tolist()):
        if wi == 0.0:
            r = 1.0 if bi == 0.0 else math.inf
        else:
            var_plus = (half - 1) / half * wi + bi / half
            r = math.sqrt(var_plus / wi)
        worst = max(worst, r)
    return worst


def run_chains(sampler: Callable[..., Chain], *args, cfg: ChainConfig, n_chains: int = 4, **kwargs) -> list[Chain]:
    """Run ``n_chains`` independently seeded copies of ``sampler`` and attach R-hat.

    Per-chain seeds are derived from ``cfg.seed`` with numpy's SeedSequence.
    """
    if n_chains < 2:
        raise ValueError("need at least 2 chains for a convergence check")
    seeds = np.random.SeedSequence(cfg.seed).generate_state(n_chains, np.uint64)
    chains = [sampler(*args, cfg=replace(cfg, seed=int(s)), **kwargs) for s in seeds]
    rhat = split_rhat(chains)
    return [replace(c, diagnostics=replace(c.diagnostics, rhat=rhat)) for c in chains]


def write_chain_csv(chain: Chain, fh: TextIO) -> None:
    """Write ``step,value[,sigma2]`` rows with 12 significant digits."""
    writer = csv.writer(fh, lineterminator="\n")
    two_d = chain.samples.ndim == 2
    writer.writerow(["step", "value", "sigma2"] if two_d else ["step", "value"])
    iters = chain.iterations if len(chain.iterations) == len(chain) else np.arange(len(chain))
    for step, row in zip(iters.tolist(), chain.samples.tolist()):
        if two_d:
            writer.writerow([step, f"{row[0]:.12g}", f"{row[1]:.12g}"])
        else:
            writer.writerow([step, f"{row:.12g}"])
