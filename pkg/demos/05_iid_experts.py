"""The iid-experts learner: growing blocks with shrinking noise.

Block i lasts ceil(T^(1 - 2^-i)) steps, so only about log log T decisions are
ever made. Each decision uses fresh geometric noise scaled to the time
elapsed. A regret monitor hands over to plain FTPL if things go badly; that
is forced below with a small budget K.
"""

import numpy as np

from replicable_online import RandomnessBundle, iid_params
from replicable_online.adversaries import iid_bernoulli, sample_trajectory
from replicable_online.iid_experts import IidExpertsLearner

T, n = 4096, 4
params = iid_params(T, n, rho=0.25)
print("block lengths:", params.block_lengths())
costs = sample_trajectory(iid_bernoulli(T, (0.35, 0.45, 0.5, 0.6)), RandomnessBundle(0))
learner = IidExpertsLearner(params, RandomnessBundle(1))
learner.run(costs)
for b in learner.blocks:
    eps = "-" if b.eps is None else f"{b.eps:.2e}"
    print(f"  block {b.index}: start {b.start:5d} length {b.length:5d} eps {eps:>9s} expert {b.expert}")

# a hostile sequence with a tiny budget forces the fallback
forced = iid_params(T, 2, 0.25, K=150.0)
hostile = np.zeros((T, 2))
hostile[:, 0] = 1.0
learner = IidExpertsLearner(forced, RandomnessBundle(1))
learner.run(hostile)
print("\nfallback to FTPL started at step", learner.fallback_start)
