"""Splitting one node into many identities.

Pure power weighting is immune to the split. Any trust weight hands the
attacker one prior-trust share per fake identity.

Run: python3 demos/05_sybil_split.py
"""

import numpy as np

from trustchain.consensus import NodeDescriptor, combined_chance, creation_chance
from trustchain.simulator import SimConfig, run_simulation, scenario_sybil_split, sybil_ids

nodes = tuple(NodeDescriptor(f"n{i}", p) for i, p in enumerate([4, 4, 4, 4, 4]))
target = "n0"


def initial_mass(cfg):
    dist = combined_chance(
        creation_chance([n.power for n in cfg.nodes]), np.full(len(cfg.nodes), cfg.prior.mean), cfg.alpha
    ).distribution
    ids = set(sybil_ids(cfg, target))
    return sum(d for d, n in zip(dist, cfg.nodes) if n.id in ids)


def block_share(cfg):
    ids = set(sybil_ids(cfg, target))
    result = run_simulation(cfg)
    return np.mean([o.block.creator in ids for o in result.outcomes])


print("alpha  identities  initial mass  simulated block share")
for alpha in (1.0, 0.5, 0.0):
    base = SimConfig(nodes, alpha=alpha, committee_size=1, rounds=20_000, seed=3)
    for k in (1, 2, 4, 8):
        cfg = base if k == 1 else scenario_sybil_split(base, target, k)
        print(f"{alpha:5.1f}  {k:10d}  {initial_mass(cfg):12.3f}  {block_share(cfg):.3f}")
