"""Replicable online learning: blocked perturbed and lazy leaders, a black-box
replicability wrapper, an iid-experts learner, adversaries and an experiment harness."""

from .core import (ActionKind, ActionSet, CostVector, NormBound, RegretReport, Transcript,
                   best_in_hindsight, check_norm, regret, regret_of_actions)
from .randomness import RandomnessBundle, fork, sample_geometric, sample_uniform_box
from .grid import LazyGrid, collision_probability_1d, round_to_grid
from .algorithms import (FLLB, FTPL, FTPLB, BlockSchedule, FTPLBStar, OnlineLearner,
                         ParameterClampWarning, btl, btpl, fllb, fllb_params, ftpl, ftplb,
                         ftplbs, ftplbs_params)
from .framework import (FrameworkParams, ProtocolError, ReplicableWrapper, framework_params,
                        telescoping_check, wrap, wrapped_learner)
from .iid_experts import IidExpertsLearner, iid_experts_learner, iid_params
from .adversaries import (DistributionSequence, GeneratorError, coin_embedding,
                          concentration_diagnostic, fll_counterexample, load_adversary,
                          sample_trajectory)
from .harness import (ConfigError, LearnerSpec, PairedRunResult, ReplicabilityEstimate,
                      estimate_replicability, evaluate_regret, paired_run, sweep,
                      tradeoff_experiment)

__version__ = "0.1.0"
