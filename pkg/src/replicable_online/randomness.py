"""Seed-deterministic randomness tree.

A :class:`RandomnessBundle` names a node ``(master_seed, path)``. Every node maps
to its own Philox stream through :class:`numpy.random.SeedSequence`, so forking is
a pure function of the path and never touches hidden global state. Two runs that
hold the same bundle see the same random numbers; that is the whole mechanism
behind "shared internal randomness".
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Hashable, Tuple

import numpy as np


def _label_key(label: Hashable) -> int:
    # type-tagged so that 3 and "3" name different children
    text = f"{type(label).__name__}:{label}"
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "little")


@dataclass(frozen=True)
class RandomnessBundle:
    master_seed: int
    path: Tuple[Hashable, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "path", tuple(self.path))

    def fork(self, *labels: Hashable) -> "RandomnessBundle":
        """Child bundle; ``b.fork("a").fork("b") == b.fork("a", "b")``."""
        return RandomnessBundle(self.master_seed, self.path + tuple(labels))

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=tuple(_label_key(x) for x in self.path)
        )

    def generator(self) -> np.random.Generator:
        """A fresh stream positioned at the start; each call replays the same draws."""
        return np.random.Generator(np.random.Philox(self.seed_sequence()))


def fork(bundle: RandomnessBundle, *labels: Hashable) -> RandomnessBundle:
    return bundle.fork(*labels)


def fork_by_path(master_seed: int, path) -> RandomnessBundle:
    return RandomnessBundle(master_seed, tuple(path))


def sample_uniform_box(bundle: RandomnessBundle, n: int, width: float) -> np.ndarray:
    """Point uniform on ``[0, width)^n``."""
    if not width > 0:
        raise ValueError(f"domain: width must be positive, got {width}")
    if n < 1:
        raise ValueError(f"domain: dimension must be >= 1, got {n}")
    u = bundle.fork("uniform").generator().random(n)
    out = u * width
    # u * width can round up to width when u is within one ulp of 1
    return np.where(out < width, out, np.nextafter(width, 0.0))


def geometric_from_uniform(u, eps: float):
    """Inverse CDF of Geo(eps) on {1, 2, ...} for ``u`` in (0, 1]."""
    u = np.asarray(u, dtype=np.float64)
    if eps == 1.0:
        return np.ones(u.shape, dtype=np.int64)
    return 1 + np.floor(np.log(u) / math.log1p(-eps)).astype(np.int64)


def sample_geometric(bundle: RandomnessBundle, eps: float, size=None):
    """Geometric draw(s) with ``Pr[X >= t] = (1 - eps)^(t - 1)``, support ``{1, 2, ...}``.

    ``size=None`` returns a Python int; otherwise an int64 array.
    """
    if not 0 < eps <= 1:
        raise ValueError(f"domain: eps must lie in (0, 1], got {eps}")
    gen = bundle.fork("geometric").generator()
    u = 1.0 - gen.random(size if size is not None else 1)  # (0, 1]
    x = geometric_from_uniform(u, eps)
    return int(x[0]) if size is None else x
