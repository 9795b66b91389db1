"""Paired-run replicability estimation, regret evaluation, sweeps and the
coin trade-off experiment.

Bundle topology for run ``i`` under a root bundle ``R``::

    R / "traj1" / i   -> first input sequence S
    R / "traj2" / i   -> second input sequence S'
    R / "alg"   / i   -> learner randomness, shared by both runs of the pair
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from . import algorithms as alg
from .adversaries import DistributionSequence, coin_embedding, load_adversary, sample_trajectory
from .core import ActionSet, NormBound, Transcript, as_cost_array, regret
from .framework import FrameworkParams, framework_params, wrapped_learner
from .iid_experts import IidExpertsLearner, iid_params
from .randomness import RandomnessBundle

ALGORITHMS = ("ftpl", "fllb", "ftplb", "ftplbs", "framework-l1", "framework-linf", "iid-experts")
_ALIASES = {"flbb": "fllb"}

CSV_COLUMNS = ("alg", "T", "n", "rho", "B", "eps", "adversary", "trials", "repl_point",
               "repl_ci_low", "repl_ci_high", "regret_mean", "regret_se", "seed")


class ConfigError(ValueError):
    """Malformed sweep/CLI configuration; the message names the offending key path."""


# ---------------------------------------------------------------------------
# learner specs

@dataclass(frozen=True)
class LearnerSpec:
    """Picklable learner factory: ``spec(bundle)`` builds a fresh learner.

    Either give ``rho`` (parameters derived from ``T, n, rho``) or explicit
    ``B``/``eps``. OLO learners (``ftpl``, ``fllb``, ``ftplb``, ``framework-l1``)
    act on the vertices of the simplex; the rest act on ``n`` experts.
    """

    alg: str
    T: int
    n: int
    rho: Optional[float] = None
    B: Optional[int] = None
    eps: Optional[float] = None
    internal: Optional[str] = None
    K: Optional[float] = None
    noise_schedule: str = "sqrt"

    def __post_init__(self):
        name = _ALIASES.get(self.alg, self.alg)
        if name not in ALGORITHMS:
            raise ConfigError(f"alg: unknown algorithm {self.alg!r}")
        object.__setattr__(self, "alg", name)

    @property
    def norm(self) -> NormBound:
        return NormBound.L1_UNIT if self.alg in ("ftpl", "fllb", "ftplb", "framework-l1") \
            else NormBound.LINF_UNIT

    @property
    def action_set(self) -> ActionSet:
        if self.norm is NormBound.L1_UNIT:
            return ActionSet.simplex_vertices(self.n)
        return ActionSet.experts(self.n)

    def resolved(self) -> tuple[Optional[int], Optional[float]]:
        """Block size and noise/grid parameter this spec will use."""
        a = self.alg
        if a == "ftpl":
            return 1, self.eps if self.eps is not None else 1 / math.sqrt(self.T)
        if a == "iid-experts":
            return None, None
        if self.B is not None or self.eps is not None:
            if self.B is None or self.eps is None:
                raise ConfigError("B/eps: give both or neither")
            return int(self.B), float(self.eps)
        if self.rho is None:
            raise ConfigError("rho: required when B and eps are not given")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", alg.ParameterClampWarning)
            if a in ("fllb", "ftplb"):
                p = alg.fllb_params(self.T, self.n, self.rho)
            elif a == "ftplbs":
                p = alg.ftplbs_params(self.T, self.n, self.rho)
            else:
                p = framework_params(self.T, self.n, self.rho, self._variant())
        return p.B, p.eps

    def _variant(self) -> NormBound:
        return NormBound.L1_UNIT if self.alg == "framework-l1" else NormBound.LINF_UNIT

    def __call__(self, bundle: RandomnessBundle):
        a = self.alg
        if a == "iid-experts":
            if self.rho is None:
                raise ConfigError("rho: required for iid-experts")
            params = iid_params(self.T, self.n, self.rho, self.K, self.noise_schedule)
            return IidExpertsLearner(params, bundle)
        B, eps = self.resolved()
        if a == "ftpl":
            return alg.FTPL(self.action_set, eps, bundle)
        if a == "ftplb":
            return alg.FTPLB(self.action_set, eps, B, bundle)
        if a == "fllb":
            return alg.FLLB(self.action_set, eps, B, bundle)
        if a == "ftplbs":
            return alg.FTPLBStar(self.n, min(eps, 1.0), B, bundle)
        params = FrameworkParams.explicit(self.T, self.n, B, eps, self._variant())
        internal = self.internal or ("ftpl" if a == "framework-l1" else "ftplbs")
        return wrapped_learner(self.action_set, params, bundle, internal)


def play(learner, costs) -> Transcript:
    costs = as_cost_array(costs)
    return Transcript.build(learner.run(costs), costs, learner.action_set)


# ---------------------------------------------------------------------------
# paired runs

@dataclass(frozen=True)
class PairedRunResult:
    transcript_1: Transcript
    transcript_2: Transcript
    identical: bool
    first_divergence: Optional[int]  # 1-based step, None when identical

    @property
    def step_match_rate(self) -> float:
        return float(np.mean(self.transcript_1.actions == self.transcript_2.actions))


def paired_run(learner_factory: Callable, seq: DistributionSequence,
               bundle: RandomnessBundle, run: int = 0) -> PairedRunResult:
    """Two fresh learners with the same randomness on two independent draws of ``seq``."""
    s1 = sample_trajectory(seq, bundle.fork("traj1", run))
    s2 = sample_trajectory(seq, bundle.fork("traj2", run))
    shared = bundle.fork("alg", run)
    t1 = play(learner_factory(shared), s1)
    t2 = play(learner_factory(shared), s2)
    if len(t1) != len(t2):
        raise RuntimeError("internal error: paired transcripts differ in length")
    diff = np.flatnonzero(t1.actions != t2.actions)
    first = int(diff[0]) + 1 if diff.size else None
    return PairedRunResult(t1, t2, first is None, first)


def clopper_pearson(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Exact two-sided binomial interval."""
    alpha = 1 - confidence
    lo = 0.0 if successes == 0 else float(stats.beta.ppf(alpha / 2, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(stats.beta.ppf(1 - alpha / 2, successes + 1, trials - successes))
    return lo, hi


@dataclass(frozen=True)
class ReplicabilityEstimate:
    successes: int
    trials: int
    point_estimate: float
    ci_low: float
    ci_high: float
    confidence: float = 0.95
    step_match_rate: float = float("nan")  # auxiliary per-step agreement

    @classmethod
    def from_counts(cls, successes: int, trials: int, confidence: float = 0.95,
                    step_match_rate: float = float("nan")) -> "ReplicabilityEstimate":
        lo, hi = clopper_pearson(successes, trials, confidence)
        return cls(successes, trials, successes / trials, lo, hi, confidence, step_match_rate)


def _paired_chunk(args):
    factory, seq, bundle, runs = args
    out = []
    for i in runs:
        r = paired_run(factory, seq, bundle, i)
        out.append((i, r.identical, r.step_match_rate))
    return out


def _chunks(trials: int, workers: int):
    size = max(1, math.ceil(trials / (4 * workers)))
    return [range(a, min(trials, a + size)) for a in range(0, trials, size)]


def _replicability(factory, seq, trials, root: RandomnessBundle, confidence=0.95,
                   workers: int = 1) -> ReplicabilityEstimate:
    if trials < 1:
        raise ValueError("domain: trials must be >= 1")
    jobs = [(factory, seq, root, r) for r in _chunks(trials, workers)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = [x for part in ex.map(_paired_chunk, jobs) for x in part]
    else:
        results = [x for job in jobs for x in _paired_chunk(job)]
    results.sort()
    successes = sum(1 for _, ok, _ in results if ok)
    step_rate = float(np.mean([m for _, _, m in results]))
    return ReplicabilityEstimate.from_counts(successes, trials, confidence, step_rate)


def estimate_replicability(learner_factory, seq: DistributionSequence, trials: int,
                           master_seed: int, confidence: float = 0.95,
                           workers: int = 1) -> ReplicabilityEstimate:
    """Fraction of paired runs with identical action sequences, with an exact CI.

    ``workers > 1`` needs a picklable factory such as :class:`LearnerSpec`.
    """
    return _replicability(learner_factory, seq, trials, RandomnessBundle(master_seed),
                          confidence, workers)


# ---------------------------------------------------------------------------
# regret

@dataclass(frozen=True)
class RegretSummary:
    mean: float
    se: float
    reports: tuple

    @property
    def regrets(self) -> np.ndarray:
        return np.array([r.regret for r in self.reports])


def _regret(factory, source, trials, root: RandomnessBundle) -> RegretSummary:
    if trials < 1:
        raise ValueError("domain: trials must be >= 1")
    fixed = None if isinstance(source, DistributionSequence) else as_cost_array(source)
    reports = []
    for i in range(trials):
        costs = fixed if fixed is not None else sample_trajectory(source, root.fork("traj1", i))
        learner = factory(root.fork("alg", i))
        reports.append(regret(play(learner, costs), costs, learner.action_set))
    values = np.array([r.regret for r in reports])
    se = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return RegretSummary(float(values.mean()), se, tuple(reports))


def evaluate_regret(learner_factory, source, trials: int, master_seed: int) -> RegretSummary:
    """Regret over ``trials`` independent learner bundles.

    ``source`` is either a :class:`DistributionSequence` (fresh trajectory per
    trial) or a fixed ``(T, n)`` cost array.
    """
    return _regret(learner_factory, source, trials, RandomnessBundle(master_seed))


# ---------------------------------------------------------------------------
# sweeps

_AXES = ("alg", "T", "n", "rho", "adversary")


def _validate_config(config) -> dict:
    if not isinstance(config, dict):
        raise ConfigError("config: expected a mapping")
    axes = config.get("axes", {})
    if not isinstance(axes, dict):
        raise ConfigError("axes: expected a mapping of axis name to list")
    for key, values in axes.items():
        if key not in _AXES:
            raise ConfigError(f"axes.{key}: unknown axis (expected one of {', '.join(_AXES)})")
        if not isinstance(values, list):
            raise ConfigError(f"axes.{key}: expected a list")
        for i, v in enumerate(values):
            bad = (key == "alg" and _ALIASES.get(v, v) not in ALGORITHMS) \
                or (key in ("T", "n") and not (isinstance(v, int) and v >= 2)) \
                or (key == "rho" and not (isinstance(v, (int, float)) and 0 < v < 1)) \
                or (key == "adversary" and not isinstance(v, str))
            if bad:
                raise ConfigError(f"axes.{key}[{i}]: invalid value {v!r}")
    for key in ("trials", "regret_trials", "master_seed"):
        if key in config and not (isinstance(config[key], int) and config[key] >= 0):
            raise ConfigError(f"{key}: expected a non-negative integer")
    return config


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _cell_key(row) -> tuple:
    return tuple(str(row[k]) for k in ("alg", "T", "n", "rho", "adversary"))


def _run_cell(args) -> dict:
    cell, config = args
    alg_name, T, n, rho, adversary = cell
    seed = config.get("master_seed", 0)
    spec = LearnerSpec(alg_name, T, n, rho)
    seq = load_adversary(adversary, T, n, spec.norm)
    root = RandomnessBundle(seed).fork("cell", alg_name, T, n, repr(float(rho)), adversary)
    trials = config.get("trials", 100)
    rep = _replicability(spec, seq, trials, root.fork("replicability"),
                         config.get("confidence", 0.95))
    reg = _regret(spec, seq, config.get("regret_trials", trials), root.fork("regret"))
    B, eps = spec.resolved()
    return dict(alg=alg_name, T=T, n=n, rho=rho, B=B, eps=eps, adversary=adversary,
                trials=trials, repl_point=rep.point_estimate, repl_ci_low=rep.ci_low,
                repl_ci_high=rep.ci_high, regret_mean=reg.mean, regret_se=reg.se, seed=seed)


def sweep(config: dict, out: Optional[str] = None, workers: int = 1) -> list[dict]:
    """Cartesian product of the config axes; one CSV row per cell.

    Rows already present in ``out`` (matched on alg, T, n, rho, adversary) are
    kept and not recomputed. Each cell draws from its own bundle keyed by the
    cell, so results do not depend on order or parallelism.
    """
    config = _validate_config(config)
    axes = config.get("axes", {})
    grid = [] if not axes or any(len(axes.get(k, [None])) == 0 for k in _AXES) else list(
        itertools.product(*(axes.get(k, [None]) for k in _AXES)))
    for cell in grid:
        for k, v in zip(_AXES, cell):
            if v is None:
                raise ConfigError(f"axes.{k}: missing axis")
    done: dict[tuple, dict] = {}
    if out and os.path.exists(out):
        with open(out, newline="") as fh:
            for row in csv.DictReader(fh):
                done[_cell_key(row)] = row
    todo = [c for c in grid if _cell_key(dict(zip(_AXES, c))) not in done]
    jobs = [(c, config) for c in todo]
    if workers > 1 and jobs:
        with ProcessPoolExecutor(workers) as ex:
            fresh = list(ex.map(_run_cell, jobs))
    else:
        fresh = [_run_cell(j) for j in jobs]
    fresh_by_key = {_cell_key(r): r for r in fresh}
    rows = []
    for c in grid:
        key = _cell_key(dict(zip(_AXES, c)))
        rows.append(done.get(key) or fresh_by_key[key])
    if out:
        write_csv(rows, out)
        with open(out + ".meta.json", "w") as fh:
            json.dump({"written_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
                       "cells": len(rows), "computed": len(fresh)}, fh)
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


# ---------------------------------------------------------------------------
# coin trade-off

TRADEOFF_COLUMNS = ("alg", "rho", "B", "eps", "tau", "sign", "repl_point", "repl_ci_low",
                    "repl_ci_high", "regret_mean", "regret_se", "majority_accuracy")


def majority_decode(actions: np.ndarray) -> int:
    """Most played expert (0 or 1); exact ties count as expert 0."""
    return int(np.sum(actions == 1) > np.sum(actions == 0))


def tradeoff_experiment(T: int, taus: Sequence[float], rho_targets: Sequence[float],
                        trials: int = 200, regret_trials: Optional[int] = None,
                        master_seed: int = 0, algorithms: Sequence[str] = ("ftplbs",)) -> list[dict]:
    """Replicability, regret and bias-decoding accuracy on coin instances.

    For each algorithm tuned at each ``rho`` and each ``tau``, both coin signs
    are run. The majority-played expert decodes the coin: with ``sign=+1`` the
    coin lands 1 more often, expert 2 (index 1) is cheaper and the decoder is
    right when it reports index 1.
    """
    for tau in taus:
        if not 0 <= tau < 0.25:
            raise ValueError(f"domain: tau must lie in [0, 1/4), got {tau}")
    regret_trials = regret_trials or trials
    rows = []
    for name, rho, tau in itertools.product(algorithms, rho_targets, taus):
        spec = LearnerSpec(name, T, 2, rho)
        B, eps = spec.resolved()
        for sign in (1, -1):
            seq = coin_embedding(tau, sign, T)
            root = RandomnessBundle(master_seed).fork("tradeoff", name, repr(float(rho)),
                                                      repr(float(tau)), sign)
            rep = _replicability(spec, seq, trials, root.fork("replicability"))
            reg = _regret(spec, seq, regret_trials, root.fork("regret"))
            good = 1 if sign > 0 else 0
            correct = []
            for i in range(regret_trials):
                costs = sample_trajectory(seq, root.fork("regret").fork("traj1", i))
                acts = spec(root.fork("regret").fork("alg", i)).run(costs)
                correct.append(majority_decode(acts) == good)
            rows.append(dict(alg=name, rho=rho, B=B, eps=eps, tau=tau, sign=sign,
                             repl_point=rep.point_estimate, repl_ci_low=rep.ci_low,
                             repl_ci_high=rep.ci_high, regret_mean=reg.mean, regret_se=reg.se,
                             majority_accuracy=float(np.mean(correct))))
    return rows
