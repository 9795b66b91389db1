"""Parameter sweeps and the coin-problem trade-off.

A sweep is a grid over (algorithm, T, n, rho, adversary) written as CSV and
resumable by cell. The trade-off experiment embeds a biased coin into two
experts and reports replicability, regret and how well the majority action
decodes the coin's bias.
"""

import sys

from replicable_online import sweep, tradeoff_experiment
from replicable_online.harness import rows_to_csv

config = {"axes": {"alg": ["fllb", "ftplbs"], "T": [1000], "n": [2], "rho": [0.1, 0.4],
                   "adversary": ["bernoulli", "mixed"]},
          "trials": 50, "master_seed": 0}
sys.stdout.write(rows_to_csv(sweep(config)))

print()
for row in tradeoff_experiment(2000, [0.1], [0.05, 0.4], trials=50):
    print(", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
