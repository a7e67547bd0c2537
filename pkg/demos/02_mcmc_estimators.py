"""Sampling the trust posterior and checking the samplers against closed forms.

Run: python3 demos/02_mcmc_estimators.py
"""

import numpy as np

from trustchain.mcmc import (
    ChainConfig,
    GaussianModel,
    gibbs_gaussian_chain,
    mh_trust_chain,
    run_chains,
    summarize,
)
from trustchain.trust import BetaPrior, beta_mean

n, m = 14, 3
prior = BetaPrior()
cfg = ChainConfig(steps=55_000, burn_in=5_000, proposal_std=0.3, seed=1)

chain = mh_trust_chain(n, m, prior, cfg)
s = summarize(chain)
print(f"{n} correct, {m} incorrect validations")
print(f"  closed-form Beta mean  {beta_mean(n, m, prior):.4f}")
print(f"  MH posterior mean      {s.mean:.4f}  (sd {s.std:.4f}, acceptance {chain.diagnostics.acceptance_rate:.2f})")

chains = run_chains(mh_trust_chain, n, m, prior=prior, cfg=cfg, n_chains=4)
print(f"  split R-hat over 4 chains: {chains[0].diagnostics.rhat:.4f}")

# Windowed correctness fractions treated as Gaussian observations.
y = np.random.default_rng(3).normal(0.85, 0.07, 25)
hyper = GaussianModel(mu0=0.5, kappa0=1.0)
g = gibbs_gaussian_chain(y, hyper, ChainConfig(steps=20_000, burn_in=2_000, seed=2))
target = (hyper.kappa0 * hyper.mu0 + y.sum()) / (hyper.kappa0 + y.size)
print(f"\nGibbs on {y.size} window fractions: mean mu {g.first.mean():.4f}, conjugate answer {target:.4f}")

stubborn = GaussianModel(mu0=0.3, kappa0=1e9)
g = gibbs_gaussian_chain(y, stubborn, ChainConfig(steps=20_000, burn_in=2_000, seed=2))
print(f"With an overwhelming prior at 0.3 the data barely moves it: {g.first.mean():.4f}")
