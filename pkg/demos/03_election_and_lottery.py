"""Who gets to create blocks, and how the lottery lifts small nodes.

Run: python3 demos/03_election_and_lottery.py
"""

import numpy as np

from trustchain.consensus import (
    LotteryConfig,
    LotteryState,
    NodeDescriptor,
    combined_chance,
    creation_chance,
    next_creator,
    sample_creators,
)

nodes = [NodeDescriptor(f"n{i}", p) for i, p in enumerate([1, 1, 2, 3, 5, 8, 13, 21])]
powers = [n.power for n in nodes]
trust = np.array([0.9, 0.95, 0.6, 0.9, 0.8, 0.4, 0.9, 0.7])
creation = creation_chance(powers)

print("node  power  trust   alpha=1  alpha=0.5  alpha=0")
dists = {a: combined_chance(creation, trust, a).distribution for a in (1.0, 0.5, 0.0)}
for i, node in enumerate(nodes):
    print(f"{node.id:>4}  {node.power:5.0f}  {trust[i]:.2f}   {dists[1.0][i]:.3f}    "
          f"{dists[0.5][i]:.3f}      {dists[0.0][i]:.3f}")

rng = np.random.default_rng(0)
picks = sample_creators(combined_chance(creation, trust, 0.5), rng, 200_000)
freq = np.bincount(picks, minlength=len(nodes)) / picks.size
print(f"\n200k draws at alpha=0.5, total variation from target: "
      f"{0.5 * np.abs(freq - dists[0.5]).sum():.4f}")

weights = combined_chance(creation, trust, 0.5)
low = set(range(4))  # the four smallest nodes sit at or below the median power
for p in (0.9, 0.5, 0.2):
    lottery = LotteryConfig(enabled=True, nb_successes=1, nb_success_prob=p)
    state = LotteryState()
    rng = np.random.default_rng(1)
    lottery_blocks = small = 0
    rounds = 50_000
    for _ in range(rounds):
        idx, is_lottery, state = next_creator(weights, nodes, lottery, state, rng)
        lottery_blocks += is_lottery
        small += idx in low
    print(f"lottery p={p}: lottery share {lottery_blocks / rounds:.3f} "
          f"(expected {lottery.expected_share:.3f}), small-node share {small / rounds:.3f}")
