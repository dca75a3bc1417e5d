"""Dimension of an unweighted graph via spectral embedding plus twoNN.

For a trial dimension ``s`` the graph is embedded into R^s and twoNN is run
on the embedded points (:func:`algorithm1`).  :func:`sweep` repeats this for
increasing ``s`` and reports the level at which the estimate stops moving.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NetdimError
from .graph import DissimilarityMatrix, PointCloud, UnweightedGraph
from .spectral import spectral_embed
from .twonn import (
    DEFAULT_WINDOW,
    DimensionEstimate,
    estimate_dimension,
    neighbour_ratios_from_dissimilarity,
    neighbour_ratios_from_points,
)

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "SweepResult",
    "algorithm1",
    "sweep",
    "find_plateau",
    "weighted_estimate",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepConfig:
    """Trial dimensions ``s_min..s_max`` and the plateau rule.

    A plateau is ``plateau_len`` consecutive trial dimensions whose
    successive relative changes ``|d(s) - d(s-1)| / d(s)`` are all below
    ``plateau_epsilon``.  With ``warm_start`` the embedding is computed once
    at ``s_max`` and its leading columns reused for each ``s``.
    """

    s_min: int = 2
    s_max: int = 30
    plateau_epsilon: float = 0.05
    plateau_len: int = 3
    window: tuple[float, float] = DEFAULT_WINDOW
    stop_at_plateau: bool = True
    warm_start: bool = False
    solver: str = "auto"
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.s_min <= self.s_max:
            raise DomainError(f"need 2 <= s_min <= s_max, got {self.s_min}, {self.s_max}")
        if not self.plateau_epsilon > 0:
            raise DomainError(f"plateau_epsilon must be positive, got {self.plateau_epsilon}")
        if self.plateau_len < 2:
            raise DomainError(f"plateau_len must be >= 2, got {self.plateau_len}")


@dataclass(frozen=True)
class SweepRecord:
    s: int
    d_star: float = float("nan")
    d_min: float = float("nan")
    d_max: float = float("nan")
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class SweepResult:
    records: tuple[SweepRecord, ...]
    config: SweepConfig
    plateau: tuple[int, ...] = ()
    plateau_mean: float | None = None
    chosen_dimension: int | None = None

    @property
    def has_plateau(self) -> bool:
        return self.chosen_dimension is not None

    def d_star(self) -> dict[int, float]:
        return {r.s: r.d_star for r in self.records}


@dataclass
class _PlateauTracker:
    epsilon: float
    length: int
    run: list = field(default_factory=list)

    def push(self, rec: SweepRecord) -> bool:
        if not rec.ok:
            self.run = []
            return False
        if self.run:
            prev = self.run[-1]
            change = abs(rec.d_star - prev.d_star) / rec.d_star
            if prev.s == rec.s - 1 and change < self.epsilon:
                self.run.append(rec)
            else:
                self.run = [rec]
        else:
            self.run = [rec]
        return len(self.run) >= self.length


def find_plateau(records, epsilon: float, length: int) -> tuple[SweepRecord, ...]:
    """First run of ``length`` consecutive records meeting the plateau rule, or ``()``."""
    tracker = _PlateauTracker(epsilon, length)
    for rec in records:
        if tracker.push(rec):
            return tuple(tracker.run[-length:])
    return ()


def _estimate_embedded(coords, window) -> DimensionEstimate:
    return estimate_dimension(neighbour_ratios_from_points(PointCloud(coords)), window)


def algorithm1(
    a: UnweightedGraph,
    s: int,
    *,
    window=DEFAULT_WINDOW,
    solver: str = "auto",
    seed: int = 0,
) -> DimensionEstimate:
    """Spectrally embed ``a`` into R^s, then estimate the dimension of the embedded cloud."""
    if not 2 <= s <= a.n - 1:
        raise DomainError(f"trial dimension must lie in [2, {a.n - 1}], got {s}")
    emb = spectral_embed(a, s, solver=solver, seed=seed)
    return _estimate_embedded(emb.coordinates, window)


def sweep(
    a: UnweightedGraph,
    cfg: SweepConfig = SweepConfig(),
    *,
    estimator: Callable[[UnweightedGraph, int], DimensionEstimate] | None = None,
) -> SweepResult:
    """Run :func:`algorithm1` for ``s = s_min..s_max`` and detect the plateau.

    A failing trial dimension is recorded with its error message and breaks
    any plateau run in progress.  ``estimator`` replaces :func:`algorithm1`
    (used for testing the plateau logic in isolation).
    """
    if estimator is None:
        if cfg.s_max > a.n - 1:
            raise DomainError(f"s_max must be <= n - 1 = {a.n - 1}, got {cfg.s_max}")
        if cfg.warm_start:
            full = spectral_embed(a, cfg.s_max, solver=cfg.solver, seed=cfg.seed).coordinates

            def estimator(g, s):
                return _estimate_embedded(np.ascontiguousarray(full[:, :s]), cfg.window)
        else:

            def estimator(g, s):
                return algorithm1(g, s, window=cfg.window, solver=cfg.solver, seed=cfg.seed)

    records = []
    tracker = _PlateauTracker(cfg.plateau_epsilon, cfg.plateau_len)
    plateau = ()
    for s in range(cfg.s_min, cfg.s_max + 1):
        try:
            est = estimator(a, s)
            rec = SweepRecord(s, est.d_star, est.d_min, est.d_max)
        except NetdimError as exc:
            rec = SweepRecord(s, error=str(exc))
        log.debug("s=%d d_star=%s", s, rec.d_star if rec.ok else rec.error)
        records.append(rec)
        if tracker.push(rec) and not plateau:
            plateau = tuple(tracker.run[-cfg.plateau_len :])
            if cfg.stop_at_plateau:
                break

    if not plateau:
        return SweepResult(records=tuple(records), config=cfg)
    mean = float(np.mean([r.d_star for r in plateau]))
    return SweepResult(
        records=tuple(records),
        config=cfg,
        plateau=tuple(r.s for r in plateau),
        plateau_mean=mean,
        chosen_dimension=int(round(mean)),
    )


def weighted_estimate(m: DissimilarityMatrix, *, window=DEFAULT_WINDOW) -> DimensionEstimate:
    """twoNN directly on a dissimilarity matrix; no embedding step."""
    return estimate_dimension(neighbour_ratios_from_dissimilarity(m), window)
