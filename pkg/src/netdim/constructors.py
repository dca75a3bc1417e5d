"""Synthetic ground truth and graph binarisations.

Random draws come from numpy's Philox bit generator, a counter-based RNG
whose stream for a given seed is fixed across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import _nn
from .errors import DomainError
from .graph import PointCloud, UnweightedGraph, euclidean

__all__ = [
    "RNG_NAME",
    "SamplerSpec",
    "NoiseSpec",
    "rng",
    "sample",
    "knn_graph",
    "default_k",
    "geometric_graph",
    "cube_gap_volume",
    "flip_noise",
]

RNG_NAME = "philox4x64-numpy"

DISTRIBUTIONS = ("cube", "gauss")

# upper-triangle entries drawn per batch in flip_noise
_FLIP_BATCH = 1 << 22


def rng(seed: int) -> np.random.Generator:
    """Seeded Philox generator; the one source of randomness in the package."""
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class SamplerSpec:
    distribution: str
    dim: int
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise DomainError(f"distribution must be one of {DISTRIBUTIONS}, got {self.distribution!r}")
        if self.dim < 1 or self.n < 1:
            raise DomainError(f"need dim >= 1 and n >= 1, got dim={self.dim}, n={self.n}")


@dataclass(frozen=True)
class NoiseSpec:
    p: float
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise DomainError(f"flip probability must lie in [0, 1], got {self.p}")


def sample(spec: SamplerSpec) -> PointCloud:
    """Draw ``spec.n`` points, uniform on ``[0, 1]^dim`` or standard normal."""
    g = rng(spec.seed)
    if spec.distribution == "cube":
        X = g.random((spec.n, spec.dim))
    else:
        X = g.standard_normal((spec.n, spec.dim))
    return PointCloud(X)


def default_k(n: int) -> int:
    """``floor(30 ln n)`` neighbours."""
    if n < 2:
        raise DomainError(f"default_k needs n >= 2, got {n}")
    return math.floor(30 * math.log(n))


def knn_graph(p: PointCloud, k: int) -> UnweightedGraph:
    """Union-rule KNN graph: ``{i, j}`` is an edge if either is among the other's k nearest."""
    if not 1 <= k <= p.n - 1:
        raise DomainError(f"k must lie in [1, {p.n - 1}], got {k}")
    _, idx = _nn.kneighbors(p.points, k)
    rows = np.repeat(np.arange(p.n), k)
    return UnweightedGraph.from_pairs(p.n, np.column_stack([rows, idx.ravel()]))


def geometric_graph(p: PointCloud, r: float) -> UnweightedGraph:
    """Edge ``{i, j}`` iff ``|x_i - x_j| < r`` (strict)."""
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    pairs = cKDTree(p.points).query_pairs(r * (1 + 1e-9), output_type="ndarray")
    if len(pairs):
        d = euclidean(p.points[pairs[:, 0]], p.points[pairs[:, 1]])
        pairs = pairs[d < r]
    return UnweightedGraph.from_pairs(p.n, pairs)


def cube_gap_volume(d: int, r: float) -> float:
    """Volume left in the unit d-cube by the slab ``[0,1] x [r,1-r]^(d-1)``
    plus the ``2(d-1)`` corner-bridging boxes that keep it connected::

        2 (d-1) (1/3)^(d-2) r + (1 - 2r)^(d-1)
    """
    if d < 2:
        raise DomainError(f"dimension must be >= 2, got {d}")
    if not 0 < r < 0.5:
        raise DomainError(f"radius must lie in (0, 1/2), got {r}")
    return 2 * (d - 1) * (1 / 3) ** (d - 2) * r + (1 - 2 * r) ** (d - 1)


def flip_noise(a: UnweightedGraph, spec: NoiseSpec) -> UnweightedGraph:
    """Flip every unordered off-diagonal pair independently with probability ``p``.

    Pairs are visited row by row over the upper triangle; one uniform draw
    per pair, so the result depends only on ``(a, spec)``.
    """
    n = a.n
    if spec.p == 0 or n < 2:
        return a
    g = rng(spec.seed)
    flipped = []
    row = 0
    while row < n - 1:
        # gather whole rows into one batch
        stop = row
        size = 0
        while stop < n - 1 and (size == 0 or size + (n - stop - 1) <= _FLIP_BATCH):
            size += n - stop - 1
            stop += 1
        u = g.random(size)
        hit = np.flatnonzero(u < spec.p)
        if hit.size:
            lengths = n - 1 - np.arange(row, stop)
            offsets = np.concatenate([[0], np.cumsum(lengths)])
            r = np.searchsorted(offsets, hit, side="right") - 1
            i = row + r
            j = i + 1 + (hit - offsets[r])
            flipped.append(i * n + j)
        row = stop
    flip_keys = np.concatenate(flipped) if flipped else np.empty(0, dtype=np.int64)
    keys = a.edges[:, 0] * n + a.edges[:, 1]
    new_keys = np.setxor1d(keys, flip_keys, assume_unique=True)
    return UnweightedGraph(n, np.column_stack([new_keys // n, new_keys % n]))

