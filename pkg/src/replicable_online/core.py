"""Domain types shared by every learner: cost vectors, action sets, transcripts
and regret accounting.

Costs are plain ``float64`` arrays. A cost *sequence* is a ``(T, n)`` array whose
row ``t`` is the cost vector revealed after the action at step ``t + 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

NORM_TOL = 1e-12

# np.cumsum is sequential; above this length prefix sums switch to a two-level
# accumulation so rounding drift stays bounded.
_PAIRWISE_THRESHOLD = 2**20


class NormBound(enum.Enum):
    L1_UNIT = "l1"
    LINF_UNIT = "linf"
    # Only for hand-built constructions (e.g. a negative day-one bonus); no
    # learner guarantee applies to such steps.
    UNBOUNDED = "none"

    @classmethod
    def parse(cls, value) -> "NormBound":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown norm bound {value!r}") from None


def check_norm(values: np.ndarray, bound: NormBound, tol: float = NORM_TOL,
               nonnegative: bool = False) -> bool:
    """True when every row of ``values`` satisfies ``bound``.

    ``nonnegative`` additionally requires entries >= 0, i.e. expert costs in [0, 1]
    under ``LINF_UNIT``.
    """
    values = np.atleast_2d(values)
    if not np.all(np.isfinite(values)):
        return False
    if nonnegative and np.any(values < -tol):
        return False
    if bound is NormBound.L1_UNIT:
        return bool(np.all(np.abs(values).sum(axis=1) <= 1.0 + tol))
    if bound is NormBound.LINF_UNIT:
        return bool(np.all(np.abs(values) <= 1.0 + tol))
    return True


@dataclass(frozen=True)
class CostVector:
    values: np.ndarray
    norm_bound: NormBound = NormBound.LINF_UNIT

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("shape: cost vector must be one-dimensional")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "norm_bound", NormBound.parse(self.norm_bound))
        experts = self.norm_bound is NormBound.LINF_UNIT
        if not check_norm(values, self.norm_bound, nonnegative=experts):
            raise ValueError(f"cost vector violates {self.norm_bound.value} bound: {values}")

    @property
    def n(self) -> int:
        return self.values.shape[0]


def as_cost_array(sequence) -> np.ndarray:
    """Coerce a cost sequence (array, list of vectors or of CostVector) to ``(T, n)``."""
    if isinstance(sequence, np.ndarray):
        arr = sequence
    else:
        rows = [c.values if isinstance(c, CostVector) else c for c in sequence]
        if not rows:
            raise ValueError("empty: cost sequence has no steps")
        arr = np.asarray(rows)
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("shape: cost sequence must be two-dimensional (T, n)")
    if arr.shape[0] == 0:
        raise ValueError("empty: cost sequence has no steps")
    return arr


def prefix_sums(costs: np.ndarray) -> np.ndarray:
    """Cumulative cost vectors ``c_{1:t}`` for ``t = 1..T`` as a ``(T, n)`` array."""
    costs = np.asarray(costs, dtype=np.float64)
    T = costs.shape[0]
    if T <= _PAIRWISE_THRESHOLD:
        return np.cumsum(costs, axis=0)
    chunk = 1 << 10
    out = np.empty_like(costs)
    carry = np.zeros(costs.shape[1])
    for start in range(0, T, chunk):
        local = np.cumsum(costs[start:start + chunk], axis=0)
        out[start:start + chunk] = local + carry
        carry = carry + local[-1]
    return out


class ActionKind(enum.Enum):
    EXPERTS = "experts"
    FINITE_POINTS = "points"


@dataclass(frozen=True)
class ActionSet:
    """Either ``n`` experts (costs read by index) or a finite set of points in R^n."""

    kind: ActionKind
    n: int
    points: Optional[np.ndarray] = None
    l1_diameter: float = field(init=False)

    def __post_init__(self):
        if self.kind is ActionKind.EXPERTS:
            if self.n < 2:
                raise ValueError("experts action set needs n >= 2")
            object.__setattr__(self, "l1_diameter", 2.0)
            return
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("finite point set must be a nonempty (k, n) array")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "n", pts.shape[1])
        diam = 0.0
        for i in range(pts.shape[0]):
            for j in range(i + 1, pts.shape[0]):
                diam = max(diam, float(np.abs(pts[i] - pts[j]).sum()))
        object.__setattr__(self, "l1_diameter", diam)

    @classmethod
    def experts(cls, n: int) -> "ActionSet":
        return cls(ActionKind.EXPERTS, n)

    @classmethod
    def finite_points(cls, points) -> "ActionSet":
        pts = np.asarray(points, dtype=np.float64)
        return cls(ActionKind.FINITE_POINTS, pts.shape[-1], pts)

    @classmethod
    def simplex_vertices(cls, n: int) -> "ActionSet":
        """The standard basis of R^n as a point set (experts embedded in OLO)."""
        return cls.finite_points(np.eye(n))

    @property
    def size(self) -> int:
        return self.n if self.kind is ActionKind.EXPERTS else self.points.shape[0]

    def scores(self, cumulative: np.ndarray) -> np.ndarray:
        """Cost of every action against one or many cost vectors (last axis = n)."""
        cumulative = np.asarray(cumulative, dtype=np.float64)
        if self.kind is ActionKind.EXPERTS:
            return cumulative
        return cumulative @ self.points.T

    def best_response(self, cumulative: np.ndarray):
        """Lowest-index minimiser of ``scores``; vectorised over leading axes."""
        return np.argmin(self.scores(cumulative), axis=-1)

    def step_costs(self, actions: np.ndarray, costs: np.ndarray) -> np.ndarray:
        """Per-step cost ``c_t(a_t)`` (experts) or ``a_t . c_t`` (points)."""
        actions = np.asarray(actions, dtype=np.int64)
        if self.kind is ActionKind.EXPERTS:
            return costs[np.arange(costs.shape[0]), actions]
        return np.einsum("ij,ij->i", self.points[actions], costs)


@dataclass(frozen=True)
class Transcript:
    actions: np.ndarray
    costs_incurred: np.ndarray
    cumulative_cost_vectors: np.ndarray

    def __post_init__(self):
        T = len(self.actions)
        if len(self.costs_incurred) != T or len(self.cumulative_cost_vectors) != T:
            raise ValueError("shape: transcript arrays have inconsistent lengths")

    def __len__(self) -> int:
        return len(self.actions)

    @classmethod
    def build(cls, actions, costs, action_set: ActionSet) -> "Transcript":
        actions = np.asarray(actions, dtype=np.int64)
        costs = as_cost_array(costs)
        if actions.shape[0] != costs.shape[0]:
            raise ValueError("shape: actions and costs differ in length")
        return cls(actions, action_set.step_costs(actions, costs), prefix_sums(costs))

    @property
    def total_cost(self) -> float:
        return float(np.sum(self.costs_incurred))


@dataclass(frozen=True)
class RegretReport:
    total_cost: float
    best_fixed_cost: float
    best_fixed_action: int
    regret: float


def _check_dims(costs: np.ndarray, actions: ActionSet) -> None:
    if costs.shape[1] != actions.n:
        raise ValueError(f"shape: cost dimension {costs.shape[1]} != action dimension {actions.n}")


def best_in_hindsight(sequence, actions: ActionSet) -> tuple[int, float]:
    """Minimum-total-cost fixed action, ties to the lowest index."""
    costs = as_cost_array(sequence)
    _check_dims(costs, actions)
    # summed per action exactly as a transcript sums its incurred costs, so a
    # transcript that always plays the winner has regret exactly 0
    T = costs.shape[0]
    totals = np.array([np.sum(actions.step_costs(np.full(T, a), costs))
                       for a in range(actions.size)])
    best = int(np.argmin(totals))
    return best, float(totals[best])


def regret(transcript: Transcript, sequence, actions: ActionSet) -> RegretReport:
    costs = as_cost_array(sequence)
    _check_dims(costs, actions)
    if len(transcript) != costs.shape[0]:
        raise ValueError("shape: transcript and sequence lengths differ")
    best, best_cost = best_in_hindsight(costs, actions)
    total = transcript.total_cost
    return RegretReport(total, best_cost, best, total - best_cost)


def regret_of_actions(actions_played: Sequence[int], sequence, actions: ActionSet) -> RegretReport:
    """Shortcut: build the transcript and report regret in one call."""
    costs = as_cost_array(sequence)
    return regret(Transcript.build(actions_played, costs, actions), costs, actions)
