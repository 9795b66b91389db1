"""Randomly offset grid rounding.

Two nearby cumulative cost vectors round to the same grid point unless a grid
line falls between them, which happens with probability proportional to their
distance. That is what keeps lazy learners stable across resampled inputs.
"""

import numpy as np

from replicable_online import LazyGrid, RandomnessBundle, collision_probability_1d, round_to_grid

grid = LazyGrid.random(eps=0.5, n=2, bundle=RandomnessBundle(0))
print("offset:", grid.offset, "spacing:", grid.spacing)
for c in ([0.0, 0.0], [0.3, -1.2], [3.0, 3.0]):
    print(f"round({c}) = {round_to_grid(grid, c)}")

print("\nPr[same grid point] for a shift of delta (eps = 1):")
for delta in (0.0, 0.1, 0.25, 0.5, 1.0, 2.0):
    est = collision_probability_1d(1.0, delta, 50_000, RandomnessBundle(1))
    print(f"  delta={delta:4.2f}  estimate={est:.3f}  exact={max(0.0, 1 - delta):.3f}")

# the rounding residual is uniform on the box, whatever the offset draw
res = np.array([round_to_grid(LazyGrid.random(0.25, 1, RandomnessBundle(2, (i,))), [1.7])[0] - 1.7
                for i in range(5000)])
print("\nresidual mean (should be near 2.0):", res.mean().round(3))
