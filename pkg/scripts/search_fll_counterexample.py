"""Search for a (bonus, drift, T) triple where unblocked FTPL fails to replicate.

For each candidate triple this estimates FTPL's full-sequence match rate over
paired runs and keeps candidates whose upper confidence bound is at most 0.5.
The chosen triple is pinned as ``FLL_FIXTURE`` in ``replicable_online.adversaries``.
"""

import argparse
import itertools

from replicable_online.adversaries import fll_counterexample
from replicable_online.harness import LearnerSpec, estimate_replicability


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("T,bonus,drift,match_rate,ci_high")
    for T, bonus, drift in itertools.product((100, 200), (-5.0, -10.0, -20.0), (0.1, 0.2, 0.4)):
        seq = fll_counterexample(T, bonus, drift)
        spec = LearnerSpec("ftpl", T, 2, eps=T ** -0.5)
        est = estimate_replicability(spec, seq, args.trials, args.seed)
        mark = "  <- ok" if est.ci_high <= 0.5 else ""
        print(f"{T},{bonus},{drift},{est.point_estimate:.3f},{est.ci_high:.3f}{mark}")


if __name__ == "__main__":
    main()
