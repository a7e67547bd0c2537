"""Trust-weighted block production with Bayesian, time-decaying trust.

Modules
-------
trust       closed-form Beta trust scores and time decay
mcmc        Metropolis-Hastings and Gibbs estimators, R-hat
consensus   creator election, validator committees, low-power lottery
simulator   seeded discrete-round protocol simulation
harness     config files, sweeps, metrics, CSV output and the CLI
"""

__version__ = "0.1.0"

from .consensus import (
    LotteryConfig,
    LotteryState,
    NodeDescriptor,
    SelectionWeights,
    combined_chance,
    creation_chance,
    draw_lottery_gap,
    next_creator,
    sample_creators,
    select_creator,
    select_validators,
)
from .mcmc import (
    Chain,
    ChainConfig,
    ChainDiagnostics,
    DegenerateLikelihoodError,
    GaussianModel,
    PosteriorSummary,
    gibbs_gaussian_chain,
    mh_gaussian_chain,
    mh_trust_chain,
    run_chains,
    split_rhat,
    summarize,
)
from .simulator import (
    SimConfig,
    SimResult,
    adjudicate,
    appendix_config,
    run_round,
    run_simulation,
    scenario_sybil_split,
)
from .trust import (
    BetaPrior,
    DecayParams,
    TrustState,
    ValidationRecord,
    decay_blend,
    decayed_counts,
    record_outcome,
    trust_value,
)
