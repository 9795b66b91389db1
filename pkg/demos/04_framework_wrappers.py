"""Black-box replicability wrappers.

Each block the wrapper rounds the cumulative cost on two fresh grids, feeds the
scaled difference to an ordinary internal learner and plays its answer for
the whole block. The fed vectors stay inside the unit ball, and on average
they telescope back to the true costs.
"""

import numpy as np

from replicable_online import ActionSet, FrameworkParams, RandomnessBundle, telescoping_check
from replicable_online.framework import wrapped_learner

rng = np.random.default_rng(0)
T, n, B = 400, 3, 20
costs = rng.random((T, n))
costs /= costs.sum(axis=1, keepdims=True)

params = FrameworkParams.explicit(T, n, B, 2 * n / B, "l1")
w = wrapped_learner(ActionSet.simplex_vertices(n), params, RandomnessBundle(0), "ftpl", log=True)
actions = w.run(costs)
norms = [np.abs(v).sum() for v in w.fed_log]
print(f"l1 wrapper: {len(norms)} fed vectors, max l1 norm {max(norms):.3f}, normalizer {params.normalizer:.0f}")
print("actions per block:", actions[::B].tolist())

small = costs[:40]
p40 = FrameworkParams.explicit(40, n, 4, 2 * n / 4, "l1")
print("\ntelescoping deviation with 2000 offset draws:",
      round(telescoping_check(small, p40, RandomnessBundle(1), ActionSet.simplex_vertices(n), 2000), 4))

params = FrameworkParams.explicit(T, n, B, 2 / B, "linf")
w = wrapped_learner(ActionSet.experts(n), params, RandomnessBundle(2), "ftplbs", log=True)
w.run(rng.random((T, n)))
print(f"linf wrapper: max linf norm {max(np.abs(v).max() for v in w.fed_log):.3f}")
