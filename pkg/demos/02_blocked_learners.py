"""Blocked learners and their regret guarantees.

FTPLB recomputes a uniformly perturbed leader once per block; FTPLB* does the
same for experts with geometric noise. Their mean regret sits well under the
bounds D(B eps T + 1/eps) and eps B T + ln(n)/eps respectively.
"""

import math

import numpy as np

from replicable_online import FTPLB, ActionSet, FTPLBStar, RandomnessBundle
from replicable_online.harness import play, regret

rng = np.random.default_rng(0)
T, n = 2000, 2
costs = rng.random((T, n))
l1_costs = costs / costs.sum(axis=1, keepdims=True)

print("FTPLB on unit-l1 costs (simplex vertices, D = 2)")
for B in (1, 10, 50):
    eps = 1 / math.sqrt(B * T)
    acts = ActionSet.simplex_vertices(n)
    regs = [regret(play(FTPLB(acts, eps, B, RandomnessBundle(r)), l1_costs), l1_costs, acts).regret
            for r in range(200)]
    print(f"  B={B:3d}  mean regret {np.mean(regs):7.2f}   bound {2 * (B * eps * T + 1 / eps):7.1f}")

print("\nFTPLB* on expert costs in [0, 1]")
for B in (1, 10, 50):
    eps = math.sqrt(math.log(n) / (B * T))
    acts = ActionSet.experts(n)
    regs = [regret(play(FTPLBStar(n, eps, B, RandomnessBundle(r)), costs), costs, acts).regret
            for r in range(200)]
    print(f"  B={B:3d}  mean regret {np.mean(regs):7.2f}   bound {eps * B * T + math.log(n) / eps:7.1f}")
