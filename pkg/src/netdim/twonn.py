"""twoNN intrinsic dimension estimator.

For every node the ratio ``mu = r2 / r1`` of second- to first-nearest
neighbour distance is formed.  Under locally uniform sampling in dimension
``d`` the ratios follow ``F(mu) = 1 - mu**(-d)``.  Sorting the ratios and
matching the empirical CDF ``i/N`` gives one estimate per rank::

    d_i = -log(1 - i/N) / log(mu_sorted[i])

and the overall estimate ``d_star`` is the mean of ``d_i`` over the central
ranks ``ceil(N/4) <= i <= floor(3N/4)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _nn
from .errors import DegenerateInputError, DomainError, EstimationError
from .graph import DissimilarityMatrix, PointCloud

__all__ = [
    "DEFAULT_WINDOW",
    "NeighbourRatios",
    "DimensionEstimate",
    "Histogram",
    "neighbour_ratios_from_dissimilarity",
    "neighbour_ratios_from_points",
    "estimate_dimension",
    "nn_distance_histogram",
    "window_bounds",
]

DEFAULT_WINDOW = (0.25, 0.75)

MIN_NODES = 4

# ratios within this of 1 are ties: r1 and r2 agree to rounding error
RATIO_TIE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class NeighbourRatios:
    """Per-node first/second neighbour distances and their ratio.

    ``order`` sorts ``mu`` ascending; equal ratios keep node order.
    ``nn1``/``nn2`` are the neighbour indices realising ``r1``/``r2``.
    """

    r1: np.ndarray
    r2: np.ndarray
    mu: np.ndarray
    order: np.ndarray
    nn1: np.ndarray
    nn2: np.ndarray

    @property
    def n(self) -> int:
        return len(self.mu)

    @property
    def mu_sorted(self) -> np.ndarray:
        return self.mu[self.order]


@dataclass(frozen=True, eq=False)
class DimensionEstimate:
    """Rank-wise estimates and their windowed mean.

    ``d_curve[i - 1]`` holds ``d_i`` for ranks ``i = 1 .. n-1``; it is NaN
    where ``mu_sorted`` ties at 1 (within ``RATIO_TIE_TOL``).  ``window`` holds the inclusive 1-based
    rank bounds used for ``d_star``, ``d_min`` and ``d_max``.
    """

    n: int
    mu_sorted: np.ndarray
    d_curve: np.ndarray
    window: tuple[int, int]
    d_star: float
    d_min: float
    d_max: float
    n_used: int

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, self.n)


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    @property
    def bin_left(self):
        return self.edges[:-1]

    @property
    def bin_right(self):
        return self.edges[1:]


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def _ratios(r1, r2, j1, j2) -> NeighbourRatios:
    mu = r2 / r1
    order = np.argsort(mu, kind="stable")
    _freeze(r1, r2, mu, order, j1, j2)
    return NeighbourRatios(r1=r1, r2=r2, mu=mu, order=order, nn1=j1, nn2=j2)


def neighbour_ratios_from_dissimilarity(m: DissimilarityMatrix) -> NeighbourRatios:
    """Scan each row of ``m`` for its two smallest off-diagonal entries."""
    if m.n < MIN_NODES:
        raise DomainError(f"twoNN needs at least {MIN_NODES} nodes, got {m.n}")
    if m.has_duplicates:
        i, j = (int(v) for v in np.argwhere((m.values == 0) & ~np.eye(m.n, dtype=bool))[0])
        raise DegenerateInputError(f"zero dissimilarity between distinct nodes {i} and {j}")
    r1, r2, j1, j2 = _nn.two_smallest_per_row(m.values)
    short = np.flatnonzero(~np.isfinite(r2))
    if short.size:
        raise DegenerateInputError(
            f"node {int(short[0])} has fewer than two finite dissimilarities"
        )
    return _ratios(r1, r2, j1, j2)


def neighbour_ratios_from_points(p: PointCloud) -> NeighbourRatios:
    """Same result as the matrix path on ``pairwise_distances(p)``, via a kd-tree."""
    if p.n < MIN_NODES:
        raise DomainError(f"twoNN needs at least {MIN_NODES} nodes, got {p.n}")
    d, idx = _nn.kneighbors(p.points, 2)
    return _ratios(d[:, 0].copy(), d[:, 1].copy(), idx[:, 0].copy(), idx[:, 1].copy())


def window_bounds(n: int, window=DEFAULT_WINDOW) -> tuple[int, int]:
    """Inclusive 1-based rank range ``[ceil(lo*n), floor(hi*n)]``, capped at ``n - 1``."""
    lo_frac, hi_frac = window
    if not 0 < lo_frac <= hi_frac <= 1:
        raise DomainError(f"window fractions must satisfy 0 < lo <= hi <= 1, got {window}")
    lo = max(1, math.ceil(lo_frac * n))
    hi = min(n - 1, math.floor(hi_frac * n))
    if lo > hi:
        raise DomainError(f"window {window} selects no ranks for n={n}")
    return lo, hi


def estimate_dimension(r: NeighbourRatios, window=DEFAULT_WINDOW) -> DimensionEstimate:
    n = r.n
    lo, hi = window_bounds(n, window)
    mu = r.mu_sorted
    ranks = np.arange(1, n)
    log_mu = np.log(mu[:-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        d = -np.log(1.0 - ranks / n) / log_mu
    d[mu[:-1] - 1.0 <= RATIO_TIE_TOL] = np.nan

    sel = d[lo - 1 : hi]
    valid = sel[~np.isnan(sel)]
    if valid.size == 0:
        raise EstimationError(
            f"all ratios in ranks {lo}..{hi} are tied at 1; no spread to estimate from"
        )
    d.setflags(write=False)
    return DimensionEstimate(
        n=n,
        mu_sorted=mu,
        d_curve=d,
        window=(lo, hi),
        d_star=float(valid.mean()),
        d_min=float(valid.min()),
        d_max=float(valid.max()),
        n_used=int(valid.size),
    )


def nn_distance_histogram(r: NeighbourRatios, bins: int) -> Histogram:
    """Equal-width histogram of first-neighbour distances over ``[min r1, max r1]``."""
    if bins < 2:
        raise DomainError(f"need at least 2 bins, got {bins}")
    counts, edges = np.histogram(r.r1, bins=bins)
    return Histogram(edges=edges, counts=counts)
