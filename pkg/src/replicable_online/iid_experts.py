"""iid-replicable experts learner with growing blocks and shrinking noise.

Block ``i`` lasts ``ceil(T^(1 - 2^-i))`` steps. Block 1 always plays expert 0;
every later block draws fresh geometric noise per expert and commits to the
perturbed leader for the whole block. A running regret monitor switches the
learner to ordinary geometric-noise FTPL for good once the realised regret gets
close to the worst-case budget ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algorithms import OnlineLearner
from .core import ActionSet
from .randomness import RandomnessBundle, sample_geometric


def loglog2(T: int) -> float:
    """``log2(log2(T))`` floored at 1."""
    return max(1.0, math.log2(math.log2(T))) if T > 2 else 1.0


def block_length(T: int, i: int) -> int:
    """``ceil(T^(1 - 2^-i))`` in exact integer arithmetic.

    That is the least ``L`` with ``L^(2^i) >= T^(2^i - 1)``.
    """
    k = 2 ** i
    target = T ** (k - 1)
    L = max(1, math.ceil(T ** (1 - 1 / k)))
    while L > 1 and (L - 1) ** k >= target:
        L -= 1
    while L ** k < target:
        L += 1
    return L


def block_lengths(T: int) -> list[int]:
    """Block lengths actually used on a horizon of ``T`` (last one truncated)."""
    out, used, i = [], 0, 1
    while used < T:
        L = min(block_length(T, i), T - used)
        out.append(L)
        used += L
        i += 1
    return out


@dataclass(frozen=True)
class IidScheduleParams:
    T: int
    n: int
    rho: float
    llT: float
    alpha: float
    gamma: float
    beta: float
    eta: float
    K: float
    noise_schedule: str = "sqrt"

    @property
    def fallback_threshold(self) -> float:
        return self.K - 2 * math.sqrt(self.T * math.log(self.n))

    @property
    def fallback_eps(self) -> float:
        return min(1.0, math.sqrt(math.log(self.n) / self.T))

    def block_lengths(self) -> list[int]:
        return block_lengths(self.T)

    def block_eps(self, elapsed: int) -> float:
        """Noise parameter for a block that starts after ``elapsed`` steps."""
        scale = math.sqrt(elapsed) if self.noise_schedule == "sqrt" else float(elapsed)
        return min(1.0, self.gamma / (2 * self.alpha * scale))


def iid_params(T: int, n: int, rho: float, K: Optional[float] = None,
               noise_schedule: str = "sqrt") -> IidScheduleParams:
    """Derived constants; ``K`` may be overridden (the default is very conservative)."""
    if T < 4 or n < 2:
        raise ValueError("domain: need T >= 4 and n >= 2")
    if not 0 < rho < 1:
        raise ValueError(f"domain: rho must lie in (0, 1), got {rho}")
    if noise_schedule not in ("sqrt", "linear"):
        raise ValueError("noise_schedule must be 'sqrt' or 'linear'")
    ll = loglog2(T)
    alpha = math.sqrt(math.log(8 * n * ll / rho))
    gamma = rho / (8 * ll)
    beta = math.log(8 * n * ll / rho)
    eta = math.sqrt(2 * math.log(16 * n / rho))
    if K is None:
        K = 1000 * (1 / rho) * ll**2 * math.log(n * ll / rho) * math.sqrt(T)
    return IidScheduleParams(T, n, rho, ll, alpha, gamma, beta, eta, float(K), noise_schedule)


@dataclass
class MonitorState:
    """Running regret of the learner against the best expert on the observed prefix."""

    threshold: float
    T: int
    n: int
    t: int = 0
    own_cost: float = 0.0
    cumulative: np.ndarray = None
    triggered: bool = False

    def __post_init__(self):
        if self.cumulative is None:
            self.cumulative = np.zeros(self.n)

    @property
    def regret(self) -> float:
        return self.own_cost - float(self.cumulative.min()) if self.t else 0.0

    def record(self, action: int, cost: np.ndarray) -> bool:
        self.own_cost += float(cost[action])
        self.cumulative = self.cumulative + cost
        self.t += 1
        return regret_monitor(self)


def regret_monitor(state: MonitorState) -> bool:
    """True once ``t == T`` or the regret reaches the threshold; latches."""
    if not state.triggered and (state.t >= state.T or state.regret >= state.threshold):
        state.triggered = True
    return state.triggered


@dataclass(frozen=True)
class BlockRecord:
    index: int
    start: int
    length: int
    eps: Optional[float]
    expert: int


class IidExpertsLearner(OnlineLearner):
    def __init__(self, params: IidScheduleParams, bundle: RandomnessBundle):
        super().__init__(ActionSet.experts(params.n))
        self.params = params
        self._bundle = bundle
        self._lengths = params.block_lengths()
        self.blocks: list[BlockRecord] = []
        self._block_end = 0
        self.monitor = MonitorState(params.fallback_threshold, params.T, params.n)
        self.fallback_start: Optional[int] = None
        self._fallback_noise: Optional[np.ndarray] = None

    @property
    def in_fallback(self) -> bool:
        return self._fallback_noise is not None

    def _decide(self, step):
        if self.in_fallback:
            return int(np.argmin(self._cum - self._fallback_noise))
        if step <= self._block_end:
            return self._action
        i = len(self.blocks) + 1
        length = self._lengths[i - 1] if i <= len(self._lengths) else self.params.T - step + 1
        if step == 1:
            eps, expert = None, 0
        else:
            eps = self.params.block_eps(step - 1)
            noise = sample_geometric(self._bundle.fork("block", i), eps, size=self.params.n)
            expert = int(np.argmin(self._cum - noise))
        self.blocks.append(BlockRecord(i, step, length, eps, expert))
        self._block_end = step - 1 + length
        return expert

    def observe(self, cost) -> None:
        action = self.act()
        super().observe(cost)
        if self.in_fallback:
            return
        if self.monitor.record(action, np.asarray(cost, dtype=np.float64)) and self.t < self.params.T:
            self.fallback_start = self.t + 1
            self._fallback_noise = sample_geometric(
                self._bundle.fork("fallback"), self.params.fallback_eps, size=self.params.n)


def iid_experts_learner(params: IidScheduleParams, bundle: RandomnessBundle) -> IidExpertsLearner:
    return IidExpertsLearner(params, bundle)
