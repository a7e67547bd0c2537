"""A full network run, then a sweep over the power/trust mix.

Run: python3 demos/04_simulation_and_sweep.py [output_dir]
"""

import sys
from pathlib import Path

from trustchain.harness import ExperimentSpec, load_config, metrics_report, run_experiment
from trustchain.simulator import run_simulation

root = Path(__file__).resolve().parents[1]
config = load_config(root / "configs" / "network10.cfg")
result = run_simulation(config)

print("node  power  honesty  created  accepted  final trust")
created, accepted, final = result.blocks_created(), result.blocks_accepted(), result.final_trust()
for i, node in enumerate(config.nodes):
    print(f"{node.id:>4}  {node.power:5.1f}  {node.honesty:7.2f}  {created[i]:7d}  {accepted[i]:8d}  {final[i]:.3f}")

report = metrics_report(result)
print(f"\ngini {report.gini:.3f}, low-power share {report.low_power_share:.3f}, "
      f"acceptance {report.acceptance_rate:.3f}, trust MAE {report.trust_mae:.3f}")

out = Path(sys.argv[1]) if len(sys.argv) > 1 else None
spec = ExperimentSpec(config, "alpha", (0.0, 0.5, 1.0), (0, 1, 2), out)
rows = run_experiment(spec)
print("\nalpha  seed  gini   acceptance")
for row in rows:
    print(f"{row['sweep_value']:5.2f}  {row['seed']:4d}  {row['gini']:.3f}  {row['acceptance_rate']:.3f}")
if out is not None:
    print(f"per-cell CSVs and metrics.csv written under {out}")
