"""Randomly offset lattice used to round cumulative cost vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .randomness import RandomnessBundle, sample_uniform_box


@dataclass(frozen=True)
class LazyGrid:
    """Lattice ``{offset + z / eps : z in Z^n}`` with spacing ``1 / eps``."""

    eps: float
    offset: np.ndarray

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("domain: eps must be positive")
        off = np.array(self.offset, dtype=np.float64).reshape(-1)
        spacing = 1.0 / self.eps
        if np.any(off < 0) or np.any(off >= spacing):
            raise ValueError("offset coordinates must lie in [0, 1/eps)")
        off.setflags(write=False)
        object.__setattr__(self, "offset", off)

    @property
    def spacing(self) -> float:
        return 1.0 / self.eps

    @property
    def n(self) -> int:
        return self.offset.shape[0]

    @classmethod
    def random(cls, eps: float, n: int, bundle: RandomnessBundle) -> "LazyGrid":
        return cls(eps, sample_uniform_box(bundle, n, 1.0 / eps))


def round_to_grid(grid: LazyGrid, c) -> np.ndarray:
    """The unique grid point in the half-open box ``c + [0, 1/eps)^n``.

    Accepts a single vector or a stack of vectors (last axis = n).
    """
    c = np.asarray(c, dtype=np.float64)
    if c.shape[-1] != grid.n:
        raise ValueError(f"shape: grid has dimension {grid.n}, vector has {c.shape[-1]}")
    return _round(grid.offset, grid.eps, c)


def _round(offset, eps: float, c):
    h = 1.0 / eps
    g = offset + h * np.ceil((c - offset) * eps)
    # absorb floating-point error at lattice boundaries: one step at most.
    # Test g - h < c <= g directly; forming c + h can round away a tiny c.
    g = np.where(g < c, g + h, g)
    return np.where(g - h >= c, g - h, g)


def collision_probability_1d(eps: float, delta: float, trials: int,
                             bundle: RandomnessBundle, c: float = 0.0) -> float:
    """Monte-Carlo estimate of ``Pr[round(c) == round(c + delta)]`` over offsets.

    The exact value is ``max(0, 1 - eps * |delta|)``.
    """
    if delta < 0:
        raise ValueError("domain: delta must be non-negative")
    h = 1.0 / eps
    offsets = bundle.fork("collision").generator().random(trials) * h
    offsets = np.minimum(offsets, np.nextafter(h, 0.0))
    return float(np.mean(_round(offsets, eps, c) == _round(offsets, eps, c + delta)))
