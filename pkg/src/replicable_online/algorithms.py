"""Online learners: FTPL, blocked lazy leader (FLLB), blocked perturbed leader
with uniform noise (FTPLB) and with geometric noise (FTPLB*), plus the
be-the-leader oracles used as baselines.

Every learner follows the same protocol. ``act()`` returns the action for the
next step using only the costs observed so far and the learner's bundle;
``observe(cost)`` reveals that step's cost vector. ``run(costs)`` plays a whole
sequence; the blocked learners override it with a vectorised path that produces
exactly the same actions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ActionSet, as_cost_array
from .grid import LazyGrid, round_to_grid
from .randomness import RandomnessBundle, sample_geometric, sample_uniform_box


class ParameterClampWarning(UserWarning):
    """A derived block size exceeded the horizon and was clamped to ``T``."""


@dataclass(frozen=True)
class BlockSchedule:
    block_size: int

    def __post_init__(self):
        if int(self.block_size) < 1:
            raise ValueError("domain: block size must be >= 1")
        object.__setattr__(self, "block_size", int(self.block_size))

    def is_transition(self, t: int) -> bool:
        return (t - 1) % self.block_size == 0

    def transitions(self, T: int) -> np.ndarray:
        """1-based transition steps within ``1..T``."""
        return np.arange(1, T + 1, self.block_size)

    def expand(self, block_actions: np.ndarray, T: int) -> np.ndarray:
        return np.repeat(np.asarray(block_actions, dtype=np.int64), self.block_size)[:T]


class OnlineLearner:
    """Base class: holds the action set and the step counter."""

    def __init__(self, actions: ActionSet):
        self.action_set = actions
        self.t = 0  # number of cost vectors observed so far
        self._cum = np.zeros(actions.n)
        self._action: Optional[int] = None
        self._action_step = 0

    @property
    def cumulative(self) -> np.ndarray:
        return self._cum.copy()

    def act(self) -> int:
        step = self.t + 1
        if self._action_step != step:
            self._action = int(self._decide(step))
            self._action_step = step
        return self._action

    def observe(self, cost) -> None:
        cost = np.asarray(cost, dtype=np.float64)
        if cost.shape != (self.action_set.n,):
            raise ValueError(f"shape: expected cost of shape ({self.action_set.n},)")
        if self._action_step != self.t + 1:
            self.act()
        self._cum = self._cum + cost
        self.t += 1

    def _decide(self, step: int) -> int:
        raise NotImplementedError

    def run(self, costs) -> np.ndarray:
        costs = as_cost_array(costs)
        if self.t == 0 and hasattr(self, "_run_batch"):
            actions = self._run_batch(costs)
            for c in costs:  # keep step state consistent with a stepwise replay
                self._cum = self._cum + c
            self.t = costs.shape[0]
            self._action, self._action_step = int(actions[-1]), self.t
            return actions
        return self._run_steps(costs)

    def _run_steps(self, costs) -> np.ndarray:
        out = np.empty(costs.shape[0], dtype=np.int64)
        for i, c in enumerate(costs):
            out[i] = self.act()
            self.observe(c)
        return out


def _prefix_with_zero(costs: np.ndarray) -> np.ndarray:
    """Row ``k`` is ``c_{1:k}``, row 0 is the zero vector."""
    out = np.zeros((costs.shape[0] + 1, costs.shape[1]))
    np.cumsum(costs, axis=0, out=out[1:])
    return out


class FTPL(OnlineLearner):
    """Follow the perturbed leader with a hallucinated day-zero cost
    ``c_0 ~ Unif[0, 1/eps)^n``; recomputes the leader every step."""

    def __init__(self, actions: ActionSet, eps: float, bundle: RandomnessBundle):
        if not eps > 0:
            raise ValueError("domain: eps must be positive")
        super().__init__(actions)
        self.eps = eps
        self.c0 = sample_uniform_box(bundle.fork("c0"), actions.n, 1.0 / eps)

    def _decide(self, step):
        return self.action_set.best_response(self._cum + self.c0)

    def _run_batch(self, costs):
        return self.action_set.best_response(_prefix_with_zero(costs)[:-1] + self.c0)


class FTPLB(OnlineLearner):
    """Blocked FTPL: the perturbed leader is recomputed only at transitions."""

    def __init__(self, actions: ActionSet, eps: float, B: int, bundle: RandomnessBundle):
        if not eps > 0:
            raise ValueError("domain: eps must be positive")
        super().__init__(actions)
        self.eps = eps
        self.schedule = BlockSchedule(B)
        self.c0 = sample_uniform_box(bundle.fork("c0"), actions.n, 1.0 / eps)

    def _decide(self, step):
        if self.schedule.is_transition(step):
            return self.action_set.best_response(self._cum + self.c0)
        return self._action

    def _run_batch(self, costs):
        T = costs.shape[0]
        trans = self.schedule.transitions(T)
        C = _prefix_with_zero(costs)[trans - 1]
        return self.schedule.expand(self.action_set.best_response(C + self.c0), T)


class FLLB(OnlineLearner):
    """Follow the lazy leader with block updates.

    One grid offset is drawn at construction. At each transition the cumulative
    cost is rounded to its covering grid point and the learner best-responds to
    that point; between transitions it repeats its previous action.
    """

    def __init__(self, actions: ActionSet, eps: float, B: int, bundle: RandomnessBundle):
        if not eps > 0:
            raise ValueError("domain: eps must be positive")
        super().__init__(actions)
        self.eps = eps
        self.schedule = BlockSchedule(B)
        self.grid = LazyGrid.random(eps, actions.n, bundle.fork("grid"))

    def _decide(self, step):
        if self.schedule.is_transition(step):
            return self.action_set.best_response(round_to_grid(self.grid, self._cum))
        return self._action

    def _run_batch(self, costs):
        T = costs.shape[0]
        trans = self.schedule.transitions(T)
        g = round_to_grid(self.grid, _prefix_with_zero(costs)[trans - 1])
        return self.schedule.expand(self.action_set.best_response(g), T)


class FTPLBStar(OnlineLearner):
    """Experts learner with one geometric perturbation per expert, drawn once.

    At transitions it plays ``argmin_a (cumulative cost of a) - X_a``.
    """

    def __init__(self, n: int, eps: float, B: int, bundle: RandomnessBundle):
        if not 0 < eps <= 1:
            raise ValueError("domain: eps must lie in (0, 1]")
        super().__init__(ActionSet.experts(n))
        self.eps = eps
        self.schedule = BlockSchedule(B)
        self.noise = sample_geometric(bundle.fork("noise"), eps, size=n)

    def _decide(self, step):
        if self.schedule.is_transition(step):
            return int(np.argmin(self._cum - self.noise))
        return self._action

    def _run_batch(self, costs):
        T = costs.shape[0]
        trans = self.schedule.transitions(T)
        C = _prefix_with_zero(costs)[trans - 1]
        return self.schedule.expand(np.argmin(C - self.noise, axis=1), T)


def ftpl(actions: ActionSet, eps: float, bundle: RandomnessBundle) -> FTPL:
    return FTPL(actions, eps, bundle)


def ftplb(actions: ActionSet, eps: float, B: int, bundle: RandomnessBundle) -> FTPLB:
    return FTPLB(actions, eps, B, bundle)


def fllb(actions: ActionSet, params, bundle: RandomnessBundle) -> FLLB:
    """FLLB from a params object (anything with ``eps`` and ``B``)."""
    return FLLB(actions, params.eps, params.B, bundle)


def ftplbs(n: int, eps: float, B: int, bundle: RandomnessBundle) -> FTPLBStar:
    return FTPLBStar(n, eps, B, bundle)


# ---------------------------------------------------------------------------
# hindsight oracles (need the whole sequence; test baselines only)

def btl(costs, actions: ActionSet) -> np.ndarray:
    """Be-the-leader: ``a_t = argmin_a a . c_{1:t}`` (includes the current step)."""
    costs = as_cost_array(costs)
    return actions.best_response(np.cumsum(costs, axis=0))


def btpl(costs, actions: ActionSet, noise) -> np.ndarray:
    """Be-the-perturbed-leader: ``noise`` is the day-zero cost vector.

    For the geometric experts learner pass ``-X``.
    """
    costs = as_cost_array(costs)
    return actions.best_response(np.cumsum(costs, axis=0) + np.asarray(noise, dtype=np.float64))


# ---------------------------------------------------------------------------
# parameter derivation

@dataclass(frozen=True)
class FLLBParams:
    T: int
    n: int
    rho: float
    B: int
    eps: float
    clamped: bool = False


@dataclass(frozen=True)
class FTPLBSParams:
    T: int
    n: int
    rho: float
    B: int
    eps: float
    clamped: bool = False


def _check_horizon(T, n, rho):
    if not 0 < rho < 1:
        raise ValueError(f"domain: rho must lie in (0, 1), got {rho}")
    if T < 2 or n < 2:
        raise ValueError("domain: need T >= 2 and n >= 2")


def _clamp(raw: float, T: int, name: str) -> tuple[int, bool]:
    B = max(1, math.ceil(raw))
    if B > T:
        warnings.warn(f"{name}: block size {B} exceeds horizon {T}; clamped to T "
                      "(replicability becomes trivial, regret guarantee vacuous)",
                      ParameterClampWarning, stacklevel=3)
        return T, True
    return B, False


def fllb_block_size(T: int, n: int, rho: float) -> float:
    """Unrounded block size ``(2 (sqrt(2 ln(2T/rho)) + 2) sqrt(n) T / rho)^(2/3)``."""
    p = math.sqrt(2 * math.log(2 * T / rho)) + 2
    return (2 * p * math.sqrt(n) * T / rho) ** (2 / 3)


def ftplbs_block_size(T: int, n: int, rho: float) -> float:
    """Unrounded block size ``(8 sqrt(2 (ln(8T/rho)/ln n + 1)) ln(n) T / rho)^(2/3)``."""
    p = math.sqrt(2 * (math.log(8 * T / rho) / math.log(n) + 1))
    return (8 * p * math.log(n) * T / rho) ** (2 / 3)


def fllb_params(T: int, n: int, rho: float) -> FLLBParams:
    _check_horizon(T, n, rho)
    B, clamped = _clamp(fllb_block_size(T, n, rho), T, "fllb")
    return FLLBParams(T, n, rho, B, 1 / math.sqrt(B * T), clamped)


def ftplbs_params(T: int, n: int, rho: float) -> FTPLBSParams:
    _check_horizon(T, n, rho)
    B, clamped = _clamp(ftplbs_block_size(T, n, rho), T, "ftplbs")
    return FTPLBSParams(T, n, rho, B, math.sqrt(math.log(n) / (B * T)), clamped)


# names used by the CLI and config files
flbb = fllb
flbb_params = fllb_params
