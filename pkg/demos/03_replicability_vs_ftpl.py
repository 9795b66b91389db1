"""Why blocking matters: plain FTPL is not replicable.

On the counterexample instance, expert 2 gets a head start and expert 1 slowly
catches up. Plain FTPL switches at a time that depends on the sampled costs,
so two runs with the same internal randomness rarely agree. A blocked learner
commits to far fewer decisions and replicates.
"""

from replicable_online import LearnerSpec, estimate_replicability, fll_counterexample
from replicable_online.adversaries import FLL_FIXTURE, builtin

seq = fll_counterexample(FLL_FIXTURE["n_steps"], FLL_FIXTURE["bonus"], FLL_FIXTURE["drift"])
for label, spec in [("FTPL (B=1)", LearnerSpec("ftpl", seq.T, 2, eps=FLL_FIXTURE["ftpl_eps"])),
                    ("FTPLB, B=20", LearnerSpec("ftplb", seq.T, 2, B=20, eps=FLL_FIXTURE["ftpl_eps"])),
                    ("FLLB, rho=0.2", LearnerSpec("fllb", seq.T, 2, 0.2))]:
    est = estimate_replicability(spec, seq, 300, master_seed=0)
    print(f"{label:14s} match rate {est.point_estimate:.3f}  95% CI [{est.ci_low:.3f}, {est.ci_high:.3f}]")

# at a horizon where the derived block size is below T
T = 200_000
spec = LearnerSpec("fllb", T, 2, 0.2)
print(f"\nFLLB at T={T}: B={spec.resolved()[0]}")
est = estimate_replicability(spec, builtin("bernoulli", T, 2, "l1"), 50, master_seed=1)
print(f"match rate {est.point_estimate:.3f}  CI [{est.ci_low:.3f}, {est.ci_high:.3f}]")
