"""Oblivious input models: a per-step list of cost distributions.

A :class:`DistributionSequence` is stored run-length encoded as segments
``(distribution, repeat)``. Point masses recover the usual adversarial model;
stochastic steps give the product-distribution model under which replicability
is measured. Sequences round-trip through a JSON-compatible config format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .core import NormBound, check_norm
from .randomness import RandomnessBundle


class GeneratorError(RuntimeError):
    """A generator produced a cost vector outside its declared norm bound."""


# ---------------------------------------------------------------------------
# step distributions

@dataclass(frozen=True)
class PointMass:
    cost: tuple

    kind = "point_mass"

    @property
    def n(self) -> int:
        return len(self.cost)

    def sample(self, gen: np.random.Generator, count: int) -> np.ndarray:
        return np.tile(np.asarray(self.cost, dtype=np.float64), (count, 1))

    def mean(self) -> np.ndarray:
        return np.asarray(self.cost, dtype=np.float64)

    def to_config(self) -> dict:
        return {"kind": self.kind, "cost": list(self.cost)}


@dataclass(frozen=True)
class BernoulliExperts:
    """Independent per-expert Bernoulli costs, multiplied by ``scale``."""

    bias: tuple
    scale: float = 1.0

    kind = "bernoulli"

    @property
    def n(self) -> int:
        return len(self.bias)

    def sample(self, gen, count):
        p = np.asarray(self.bias, dtype=np.float64)
        return (gen.random((count, self.n)) < p).astype(np.float64) * self.scale

    def mean(self):
        return np.asarray(self.bias, dtype=np.float64) * self.scale

    def to_config(self):
        return {"kind": self.kind, "bias": list(self.bias), "scale": self.scale}


@dataclass(frozen=True)
class UniformBox:
    """Each coordinate uniform on ``[0, width)``; ``width = 1/n`` keeps l1 <= 1."""

    dim: int
    width: float

    kind = "uniform_box"

    @property
    def n(self) -> int:
        return self.dim

    def sample(self, gen, count):
        return gen.random((count, self.dim)) * self.width

    def mean(self):
        return np.full(self.dim, self.width / 2)

    def to_config(self):
        return {"kind": self.kind, "n": self.dim, "width": self.width}


@dataclass(frozen=True)
class Coin:
    """Two complementary experts: ``c(1) = X``, ``c(2) = 1 - X``, ``X ~ Bernoulli(p)``."""

    p: float

    kind = "coin"
    n = 2

    def sample(self, gen, count):
        x = (gen.random(count) < self.p).astype(np.float64)
        return np.column_stack([x, 1.0 - x])

    def mean(self):
        return np.array([self.p, 1 - self.p])

    def to_config(self):
        return {"kind": self.kind, "p": self.p}


@dataclass(frozen=True)
class Custom:
    """Arbitrary sampler ``fn(generator, count) -> (count, n)``; not serialisable."""

    dim: int
    fn: Callable

    kind = "custom"

    @property
    def n(self) -> int:
        return self.dim

    def sample(self, gen, count):
        return np.asarray(self.fn(gen, count), dtype=np.float64).reshape(count, self.dim)

    def mean(self):
        raise NotImplementedError("custom distributions carry no mean")

    def to_config(self):
        raise TypeError("custom step distributions cannot be serialised")


_KINDS = {
    "point_mass": lambda d: PointMass(tuple(float(x) for x in d["cost"])),
    "bernoulli": lambda d: BernoulliExperts(tuple(float(x) for x in d["bias"]),
                                            float(d.get("scale", 1.0))),
    "uniform_box": lambda d: UniformBox(int(d["n"]), float(d["width"])),
    "coin": lambda d: Coin(float(d["p"])),
}


@dataclass(frozen=True)
class Segment:
    dist: object
    repeat: int = 1
    norm: Optional[NormBound] = None  # overrides the sequence-wide bound


@dataclass(frozen=True)
class DistributionSequence:
    segments: tuple
    norm_bound: NormBound = NormBound.LINF_UNIT
    name: str = "custom"

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        if not segs:
            raise ValueError("a distribution sequence needs at least one step")
        dims = {s.dist.n for s in segs}
        if len(dims) != 1:
            raise ValueError(f"shape: inconsistent step dimensions {sorted(dims)}")
        if any(s.repeat < 1 for s in segs):
            raise ValueError("segment repeat counts must be >= 1")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "norm_bound", NormBound.parse(self.norm_bound))

    @property
    def T(self) -> int:
        return sum(s.repeat for s in self.segments)

    @property
    def n(self) -> int:
        return self.segments[0].dist.n

    @property
    def is_deterministic(self) -> bool:
        return all(isinstance(s.dist, PointMass) for s in self.segments)

    def per_step(self) -> list:
        out = []
        for s in self.segments:
            out.extend([s.dist] * s.repeat)
        return out

    def mean_costs(self) -> np.ndarray:
        return np.vstack([np.tile(s.dist.mean(), (s.repeat, 1)) for s in self.segments])

    def to_config(self) -> dict:
        steps = []
        for s in self.segments:
            rec = s.dist.to_config()
            if s.norm is not None:
                rec["norm"] = s.norm.value
            steps.append(rec if s.repeat == 1 else {"repeat": s.repeat, "steps": [rec]})
        return {"name": self.name, "norm": self.norm_bound.value, "steps": steps}

    @classmethod
    def from_config(cls, config: dict) -> "DistributionSequence":
        try:
            segs = _parse_steps(config["steps"], "steps")
            return cls(tuple(segs), NormBound.parse(config.get("norm", "linf")),
                       config.get("name", "custom"))
        except KeyError as exc:
            raise ValueError(f"config: missing key {exc}") from None


def _parse_steps(steps, path) -> list:
    out = []
    for i, rec in enumerate(steps):
        where = f"{path}[{i}]"
        if "repeat" in rec:
            inner = _parse_steps(rec["steps"], f"{where}.steps")
            for _ in range(int(rec["repeat"])):
                out.extend(inner)
            continue
        kind = rec.get("kind")
        if kind not in _KINDS:
            raise ValueError(f"config: unknown step kind {kind!r} at {where}")
        norm = NormBound.parse(rec["norm"]) if "norm" in rec else None
        out.append(Segment(_KINDS[kind](rec), int(rec.get("count", 1)), norm))
    return _merge(out)


def _merge(segs) -> list:
    # identical neighbours collapse so repeat blocks stay cheap to sample
    merged: list[Segment] = []
    for s in segs:
        if merged and merged[-1].dist == s.dist and merged[-1].norm == s.norm:
            merged[-1] = Segment(s.dist, merged[-1].repeat + s.repeat, s.norm)
        else:
            merged.append(s)
    return merged


def sample_trajectory(seq: DistributionSequence, bundle: RandomnessBundle) -> np.ndarray:
    """One cost sequence ``S`` with ``S_t ~ D_t`` independently, shape ``(T, n)``.

    Segment ``k`` draws from ``bundle.fork("segment", k)``, so the draw for any
    step depends only on the bundle and the step's segment.
    """
    rows = []
    for k, seg in enumerate(seq.segments):
        gen = bundle.fork("segment", k).generator()
        block = seg.dist.sample(gen, seg.repeat)
        bound = seg.norm or seq.norm_bound
        experts = bound is NormBound.LINF_UNIT
        if not check_norm(block, bound, nonnegative=experts):
            raise GeneratorError(f"generator: segment {k} violates the {bound.value} bound")
        rows.append(block)
    return np.vstack(rows)


# ---------------------------------------------------------------------------
# builders

def point_masses(costs, norm=NormBound.LINF_UNIT, name="point_mass") -> DistributionSequence:
    costs = np.asarray(costs, dtype=np.float64)
    segs = [Segment(PointMass(tuple(float(x) for x in c))) for c in costs]
    return DistributionSequence(tuple(_merge(segs)), norm, name)


def iid_bernoulli(T: int, bias, norm=NormBound.LINF_UNIT) -> DistributionSequence:
    """iid Bernoulli expert costs; under ``l1`` they are scaled by ``1/n``."""
    norm = NormBound.parse(norm)
    bias = tuple(float(b) for b in bias)
    scale = 1.0 / len(bias) if norm is NormBound.L1_UNIT else 1.0
    return DistributionSequence((Segment(BernoulliExperts(bias, scale), T),), norm, "bernoulli")


def uniform_box(T: int, n: int) -> DistributionSequence:
    """iid uniform costs on ``[0, 1/n)^n`` (unit l1)."""
    return DistributionSequence((Segment(UniformBox(n, 1.0 / n), T),), NormBound.L1_UNIT, "uniform_box")


def mixed(T: int, n: int, norm=NormBound.LINF_UNIT, period: int = 50) -> DistributionSequence:
    """Alternating runs of point masses and Bernoulli noise.

    Point-mass runs favour expert ``k mod n`` in run ``k``; stochastic runs
    have a slight tilt toward expert 0.
    """
    norm = NormBound.parse(norm)
    scale = 1.0 / n if norm is NormBound.L1_UNIT else 1.0
    segs, used, k = [], 0, 0
    tilt = tuple(0.45 if a == 0 else 0.55 for a in range(n))
    while used < T:
        length = min(period, T - used)
        if k % 2 == 0:
            cost = np.full(n, scale)
            cost[(k // 2) % n] = 0.0
            segs.append(Segment(PointMass(tuple(cost)), length))
        else:
            segs.append(Segment(BernoulliExperts(tilt, scale), length))
        used += length
        k += 1
    return DistributionSequence(tuple(segs), norm, "mixed")


def coin_embedding(tau: float, sign: int, T: int = 1) -> DistributionSequence:
    """Two-expert iid instance from a coin of bias ``1/2 + sign * tau``.

    ``c(1)`` is the coin and ``c(2) = 1 - c(1)``; with ``sign = +1`` expert 2 is
    better by ``2 tau`` per step in expectation.
    """
    if not 0 <= tau < 0.25:
        raise ValueError(f"domain: tau must lie in [0, 1/4), got {tau}")
    if sign not in (1, -1):
        raise ValueError("domain: sign must be +1 or -1")
    return DistributionSequence((Segment(Coin(0.5 + sign * tau), T),), NormBound.LINF_UNIT,
                                f"coin{'+' if sign > 0 else '-'}{tau:g}")


def fll_counterexample(n_steps: int, bonus: float, drift: float) -> DistributionSequence:
    """Day-one bonus ``(0, bonus)`` for expert 2, then iid coin steps where
    expert 1 is cheaper by ``drift`` per step in expectation.

    The first step is outside the unit cost range by construction.
    """
    if not bonus < 0:
        raise ValueError("domain: bonus must be negative")
    if not 0 <= drift <= 1:
        raise ValueError("domain: drift must lie in [0, 1]")
    segs = [Segment(PointMass((0.0, float(bonus))), 1, NormBound.UNBOUNDED)]
    if n_steps > 1:
        segs.append(Segment(Coin(0.5 - drift / 2), n_steps - 1))
    return DistributionSequence(tuple(segs), NormBound.LINF_UNIT, "fll-counterexample")


# Frozen by scripts/search_fll_counterexample.py
FLL_FIXTURE = {"n_steps": 200, "bonus": -10.0, "drift": 0.2, "ftpl_eps": 200 ** -0.5}


def concentration_diagnostic(seq: DistributionSequence, c: float, trials: int,
                             bundle: RandomnessBundle) -> float:
    """Fraction of trajectory pairs with ``max_t |c_{1:t} - c'_{1:t}|_1 / sqrt(t n) > c``."""
    if not c > 2:
        raise ValueError("domain: c must exceed 2")
    T, n = seq.T, seq.n
    scale = np.sqrt(np.arange(1, T + 1) * n)
    hits = 0
    for k in range(trials):
        pair = bundle.fork("pair", k)
        diff = np.cumsum(sample_trajectory(seq, pair.fork(1)) - sample_trajectory(seq, pair.fork(2)), axis=0)
        if np.max(np.abs(diff).sum(axis=1) / scale) > c:
            hits += 1
    return hits / trials


# ---------------------------------------------------------------------------
# named adversaries and config files

BUILTINS = ("zero", "bernoulli", "mixed", "uniform_box", "coin", "fll-counterexample")


def builtin(name: str, T: int, n: int, norm=NormBound.LINF_UNIT, **kw) -> DistributionSequence:
    norm = NormBound.parse(norm)
    if name == "zero":
        return DistributionSequence((Segment(PointMass((0.0,) * n), T),), norm, "zero")
    if name == "bernoulli":
        return iid_bernoulli(T, kw.get("bias", (0.5,) * n), norm)
    if name == "mixed":
        return mixed(T, n, norm, kw.get("period", 50))
    if name == "uniform_box":
        return uniform_box(T, n)
    if name == "coin":
        return coin_embedding(kw.get("tau", 0.1), kw.get("sign", 1), T)
    if name == "fll-counterexample":
        return fll_counterexample(T, kw.get("bonus", FLL_FIXTURE["bonus"]),
                                  kw.get("drift", FLL_FIXTURE["drift"]))
    raise ValueError(f"unknown adversary {name!r}; builtins are {', '.join(BUILTINS)}")


def load_adversary(spec: str, T: int, n: int, norm=NormBound.LINF_UNIT) -> DistributionSequence:
    """A builtin name or a path to a JSON adversary file."""
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        with open(path) as fh:
            return DistributionSequence.from_config(json.load(fh))
    return builtin(spec, T, n, norm)
