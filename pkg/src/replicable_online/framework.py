"""Black-box conversion of a low-regret learner into a replicable one.

At the start of block ``u`` the wrapper draws two fresh grid offsets, rounds
``c_{1:t-1}`` on the first grid and ``c_{1:t-1-B}`` on the second, and feeds the
scaled difference to the internal learner. Whatever the internal learner answers
is played for the whole block. Because the two roundings are unbiased, the fed
vectors telescope to the true cumulative cost in expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algorithms import FTPL, BlockSchedule, FTPLBStar, OnlineLearner, _clamp
from .core import ActionSet, NormBound, as_cost_array, check_norm
from .grid import _round
from .randomness import RandomnessBundle, sample_uniform_box


class ProtocolError(RuntimeError):
    """The internal learner broke its contract (bad action or norm)."""


@dataclass(frozen=True)
class FrameworkParams:
    T: int
    n: int
    rho: Optional[float]
    m: Optional[float]
    gamma: Optional[float]
    B: int
    eps: float
    variant: NormBound
    clamped: bool = False

    @property
    def normalizer(self) -> float:
        spread = self.n if self.variant is NormBound.L1_UNIT else 1
        return self.B + 2 * spread / self.eps

    @classmethod
    def explicit(cls, T: int, n: int, B: int, eps: float, variant) -> "FrameworkParams":
        """Hand-picked block size and grid parameter (no replicability target)."""
        if B < 1 or not eps > 0:
            raise ValueError("domain: need B >= 1 and eps > 0")
        return cls(T, n, None, None, None, int(B), float(eps), NormBound.parse(variant))


def closeness_radius(T: int, n: int, rho: float) -> float:
    """Trajectory l1 radius ``m = (sqrt(2 ln(4T/rho) / n) + 2) sqrt(nT)``."""
    return (math.sqrt(2 * math.log(4 * T / rho) / n) + 2) * math.sqrt(n * T)


def framework_params(T: int, n: int, rho: float, variant) -> FrameworkParams:
    variant = NormBound.parse(variant)
    if not 0 < rho < 1:
        raise ValueError(f"domain: rho must lie in (0, 1), got {rho}")
    if T < 2 or n < 2:
        raise ValueError("domain: need T >= 2 and n >= 2")
    m = closeness_radius(T, n, rho)
    if variant is NormBound.L1_UNIT:
        B, clamped = _clamp(math.sqrt(8 * n * m * T / rho), T, "framework-l1")
        eps = 2 * n / B
    elif variant is NormBound.LINF_UNIT:
        B, clamped = _clamp(math.sqrt(8 * m * T / rho), T, "framework-linf")
        eps = 2 / B
    else:
        raise ValueError("domain: variant must be l1 or linf")
    # m is chosen so each per-step closeness failure is at most rho / (4T)
    gamma = rho / (4 * T)
    return FrameworkParams(T, n, rho, m, gamma, B, eps, variant, clamped)


class InternalLearner:
    """Adapter exposing an :class:`OnlineLearner` as ``step(cost) -> next action``."""

    def __init__(self, learner: OnlineLearner, norm):
        self.learner = learner
        self.norm = NormBound.parse(norm)

    @property
    def action_set(self) -> ActionSet:
        return self.learner.action_set

    def step(self, normalized_cost) -> int:
        self.learner.observe(normalized_cost)
        return self.learner.act()


def make_internal(name: str, actions: ActionSet, meta_T: int, norm,
                  bundle: RandomnessBundle) -> InternalLearner:
    """Internal learners tuned for ``meta_T`` meta-steps."""
    meta_T = max(1, meta_T)
    if name == "ftpl":
        learner = FTPL(actions, 1 / math.sqrt(meta_T), bundle)
    elif name == "ftplbs":
        eps = min(1.0, math.sqrt(math.log(actions.n) / meta_T))
        learner = FTPLBStar(actions.n, eps, 1, bundle)
    else:
        raise ValueError(f"unknown internal learner {name!r}")
    return InternalLearner(learner, norm)


def block_offsets(bundle: RandomnessBundle, u: int, n: int, eps: float):
    """Offsets ``(p_u, p'_u)`` for block ``u``; ``p`` is always drawn first."""
    node = bundle.fork("offsets", u)
    p = sample_uniform_box(node.fork("p"), n, 1 / eps)
    p_prime = sample_uniform_box(node.fork("p_prime"), n, 1 / eps)
    return p, p_prime


def fed_vector(cum_now, cum_prev, p, p_prime, eps: float, normalizer: float) -> np.ndarray:
    g = _round(p, eps, np.asarray(cum_now, dtype=np.float64))
    g_prime = _round(p_prime, eps, np.asarray(cum_prev, dtype=np.float64))
    return (g - g_prime) / normalizer


class ReplicableWrapper(OnlineLearner):
    """The external learner built around an :class:`InternalLearner`."""

    def __init__(self, internal: InternalLearner, params: FrameworkParams,
                 bundle: RandomnessBundle, log: bool = False):
        if internal.norm is not params.variant:
            raise ValueError("internal learner's declared norm does not match the variant")
        super().__init__(internal.action_set)
        self.internal = internal
        self.params = params
        self.schedule = BlockSchedule(params.B)
        self._bundle = bundle
        self._prev_boundary = np.zeros(self.action_set.n)  # c_{1:t-1-B}
        self.blocks_drawn = 0
        self.log = log
        self.fed_log: list[np.ndarray] = []
        self.offset_log: list[tuple[np.ndarray, np.ndarray]] = []

    def _decide(self, step):
        if not self.schedule.is_transition(step):
            return self._action
        u = (step - 1) // self.params.B + 1
        p, p_prime = block_offsets(self._bundle, u, self.action_set.n, self.params.eps)
        self.blocks_drawn = u
        v = fed_vector(self._cum, self._prev_boundary, p, p_prime,
                       self.params.eps, self.params.normalizer)
        if not check_norm(v, self.params.variant):
            raise ProtocolError(f"fed vector violates {self.params.variant.value} bound: {v}")
        self._prev_boundary = self._cum.copy()
        if self.log:
            self.fed_log.append(v)
            self.offset_log.append((p, p_prime))
        action = self.internal.step(v)
        if not 0 <= action < self.action_set.size:
            raise ProtocolError(f"internal learner returned out-of-range action {action}")
        return action


def wrap(internal: InternalLearner, params: FrameworkParams, bundle: RandomnessBundle,
         log: bool = False) -> ReplicableWrapper:
    return ReplicableWrapper(internal, params, bundle, log=log)


def wrapped_learner(actions: ActionSet, params: FrameworkParams, bundle: RandomnessBundle,
                    internal: str = "ftpl", log: bool = False) -> ReplicableWrapper:
    """Wrapper with a registry internal learner on its own bundle fork."""
    meta_T = math.ceil(params.T / params.B)
    inner = make_internal(internal, actions, meta_T, params.variant, bundle.fork("internal"))
    return ReplicableWrapper(inner, params, bundle.fork("external"), log=log)


def telescoping_samples(sequence, params: FrameworkParams, bundle: RandomnessBundle,
                        actions: ActionSet, draws: int = 1000):
    """Per-draw totals ``normalizer * sum_u a . (fed vector)_u`` for every action.

    The accounting sequence pads the horizon with zero costs to a multiple of
    ``B`` and feeds block ``u``'s rounded cost at the start of block ``u + 1``.
    Returns ``(samples, true_costs)`` with ``samples`` of shape ``(draws, |A|)``.
    """
    costs = as_cost_array(sequence)
    T, n = costs.shape
    B = params.B
    U = math.ceil(T / B)
    cum = np.vstack([np.zeros(n), np.cumsum(costs, axis=0)])

    def c_upto(k):
        return cum[min(max(k, 0), T)]

    totals = np.empty((draws, n))
    for d in range(draws):
        node = bundle.fork("draw", d)
        acc = np.zeros(n)
        for u in range(1, U + 1):
            p, p_prime = block_offsets(node, u + 1, n, params.eps)
            acc += fed_vector(c_upto(u * B), c_upto((u - 1) * B), p, p_prime,
                              params.eps, params.normalizer)
        totals[d] = acc * params.normalizer
    return actions.scores(totals), actions.scores(cum[-1])


def telescoping_check(sequence, params: FrameworkParams, bundle: RandomnessBundle,
                      actions: Optional[ActionSet] = None, draws: int = 1000) -> float:
    """``max_a |normalizer * sum_u E[a . fed_u] - cost(a, S)|`` with E estimated by ``draws``."""
    costs = as_cost_array(sequence)
    actions = actions or ActionSet.experts(costs.shape[1])
    samples, truth = telescoping_samples(costs, params, bundle, actions, draws)
    return float(np.max(np.abs(samples.mean(axis=0) - truth)))
