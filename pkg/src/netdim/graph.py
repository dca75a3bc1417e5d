"""Core data model: dissimilarities, weights, adjacency and point clouds.

All containers are immutable; their arrays are copied on construction and
marked read-only.  Node indices are 0-based.  An infinite dissimilarity
(``numpy.inf``) means "never a neighbour" and is the image of a zero weight
under the reciprocal rule.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, ValidationError

__all__ = [
    "INFINITE",
    "DissimilarityMatrix",
    "WeightedGraph",
    "UnweightedGraph",
    "PointCloud",
    "DuplicatePointsWarning",
    "similarity_to_dissimilarity",
    "dissimilarity_to_similarity",
    "pairwise_distances",
    "euclidean",
]

INFINITE = np.inf

# rows per block when materialising an N x N distance matrix
_CHUNK_ELEMENTS = 4_000_000


class DuplicatePointsWarning(UserWarning):
    pass


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def _check_square(a, name):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValidationError(f"{name} must have at least one node")


def _check_symmetric(a, name):
    bad = np.argwhere(a != a.T)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise ValidationError(
            f"{name} is not symmetric: entry ({i}, {j}) = {a[i, j]!r} "
            f"but ({j}, {i}) = {a[j, i]!r}"
        )


def _check_diagonal(a, name):
    diag = np.diagonal(a)
    bad = np.flatnonzero(diag != 0)
    if bad.size:
        i = int(bad[0])
        raise ValidationError(f"{name} has nonzero diagonal entry ({i}, {i}) = {diag[i]!r}")


@dataclass(frozen=True, eq=False)
class DissimilarityMatrix:
    """Symmetric non-negative N x N dissimilarities with zero diagonal.

    Entries may be ``inf`` (no relation).  Zero off-diagonal entries are
    allowed but set :attr:`has_duplicates`; the twoNN estimator refuses them.
    """

    values: np.ndarray

    def __post_init__(self):
        a = _frozen(self.values)
        _check_square(a, "dissimilarity matrix")
        if np.isnan(a).any():
            i, j = (int(v) for v in np.argwhere(np.isnan(a))[0])
            raise ValidationError(f"dissimilarity matrix has NaN at ({i}, {j})")
        if (a < 0).any():
            i, j = (int(v) for v in np.argwhere(a < 0)[0])
            raise ValidationError(f"dissimilarity matrix has negative entry ({i}, {j}) = {a[i, j]!r}")
        _check_diagonal(a, "dissimilarity matrix")
        _check_symmetric(a, "dissimilarity matrix")
        object.__setattr__(self, "values", a)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def has_duplicates(self) -> bool:
        """True if any off-diagonal entry is exactly zero."""
        off = self.values == 0
        np.fill_diagonal(off, False)
        return bool(off.any())

    def scaled(self, c: float) -> "DissimilarityMatrix":
        if not c > 0:
            raise DomainError(f"scale factor must be positive, got {c}")
        return DissimilarityMatrix(self.values * c)

    def __eq__(self, other):
        if not isinstance(other, DissimilarityMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric non-negative similarity matrix with zero diagonal.

    ``weights`` may be a dense array or any scipy sparse matrix (stored as CSR).
    """

    weights: np.ndarray | sp.csr_matrix

    def __post_init__(self):
        w = self.weights
        if sp.issparse(w):
            w = sp.csr_matrix(w, dtype=float, copy=True)
            w.sum_duplicates()
            w.eliminate_zeros()
            if w.shape[0] != w.shape[1] or w.shape[0] < 1:
                raise ValidationError(f"weight matrix must be square and non-empty, got shape {w.shape}")
            if not np.isfinite(w.data).all() or (w.data < 0).any():
                raise ValidationError("weights must be finite and non-negative")
            if w.diagonal().any():
                i = int(np.flatnonzero(w.diagonal())[0])
                raise ValidationError(f"weight matrix has nonzero diagonal entry ({i}, {i})")
            diff = (w - w.T).tocoo()
            diff.eliminate_zeros()
            if diff.nnz:
                i, j = int(diff.row[0]), int(diff.col[0])
                raise ValidationError(
                    f"weight matrix is not symmetric: entry ({i}, {j}) = {w[i, j]!r} "
                    f"but ({j}, {i}) = {w[j, i]!r}"
                )
            w.data.setflags(write=False)
        else:
            w = _frozen(w)
            _check_square(w, "weight matrix")
            if not np.isfinite(w).all():
                raise ValidationError("weights must be finite")
            if (w < 0).any():
                i, j = (int(v) for v in np.argwhere(w < 0)[0])
                raise ValidationError(f"weight matrix has negative entry ({i}, {j}) = {w[i, j]!r}")
            _check_diagonal(w, "weight matrix")
            _check_symmetric(w, "weight matrix")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.weights)

    def dense(self) -> np.ndarray:
        return self.weights.toarray() if self.is_sparse else np.array(self.weights)

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return np.array_equal(self.dense(), other.dense())


@dataclass(frozen=True, eq=False)
class UnweightedGraph:
    """Simple undirected graph on nodes ``0 .. n-1``.

    ``edges`` is an ``(m, 2)`` integer array of canonical pairs ``i < j``,
    sorted and unique.  Use :meth:`from_pairs` to build one from arbitrary
    (possibly duplicated or reversed) pairs.
    """

    n: int
    edges: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=np.int64))

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValidationError(f"graph needs at least one node, got n={n}")
        e = np.array(self.edges, dtype=np.int64, copy=True).reshape(-1, 2)
        if e.size:
            if (e[:, 0] == e[:, 1]).any():
                i = int(e[e[:, 0] == e[:, 1]][0, 0])
                raise ValidationError(f"self-loop at node {i}")
            if (e[:, 0] > e[:, 1]).any():
                raise ValidationError("edges must be canonical pairs i < j; use UnweightedGraph.from_pairs")
            if e.min() < 0 or e.max() >= n:
                raise ValidationError(f"edge endpoint out of range for n={n}")
            keys = e[:, 0] * n + e[:, 1]
            if (np.diff(keys) <= 0).any():
                raise ValidationError("edges must be sorted and unique; use UnweightedGraph.from_pairs")
        e.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_pairs(cls, n, pairs) -> "UnweightedGraph":
        """Canonicalise arbitrary pairs: orientation and duplicates are dropped."""
        p = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if p.size and (p[:, 0] == p[:, 1]).any():
            i = int(p[p[:, 0] == p[:, 1]][0, 0])
            raise ValidationError(f"self-loop at node {i}")
        lo = np.minimum(p[:, 0], p[:, 1])
        hi = np.maximum(p[:, 0], p[:, 1])
        if p.size and (lo.min() < 0 or hi.max() >= n):
            raise ValidationError(f"edge endpoint out of range for n={n}")
        keys = np.unique(lo * int(n) + hi)
        return cls(n, np.column_stack([keys // n, keys % n]))

    @classmethod
    def from_adjacency(cls, adjacency) -> "UnweightedGraph":
        """Build from a symmetric 0/1 matrix (dense or sparse)."""
        a = sp.csr_matrix(adjacency, dtype=float)
        if a.shape[0] != a.shape[1]:
            raise ValidationError(f"adjacency must be square, got shape {a.shape}")
        if a.diagonal().any():
            raise ValidationError(f"self-loop at node {int(np.flatnonzero(a.diagonal())[0])}")
        if (a != a.T).nnz:
            raise ValidationError("adjacency matrix is not symmetric")
        upper = sp.triu(a, k=1).tocoo()
        upper.eliminate_zeros()
        return cls.from_pairs(a.shape[0], np.column_stack([upper.row, upper.col]))

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric CSR adjacency with unit weights."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(i))
        return sp.csr_matrix((data, (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(self.n, self.n))

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.edges}

    def subgraph(self, nodes) -> "UnweightedGraph":
        """Induced subgraph, relabelled so ``nodes[k]`` becomes node ``k``."""
        nodes = np.asarray(nodes, dtype=np.int64)
        relabel = np.full(self.n, -1, dtype=np.int64)
        relabel[nodes] = np.arange(len(nodes))
        e = relabel[self.edges]
        e = e[(e >= 0).all(axis=1)]
        return UnweightedGraph.from_pairs(len(nodes), e)

    def __eq__(self, other):
        if not isinstance(other, UnweightedGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)


@dataclass(frozen=True, eq=False)
class PointCloud:
    """N points in R^dim, stored as an ``(n, dim)`` float array."""

    points: np.ndarray

    def __post_init__(self):
        p = np.array(self.points, dtype=float, copy=True)
        if p.ndim == 1:
            p = p.reshape(-1, 1)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValidationError(f"point cloud must be a non-empty (n, dim) array, got shape {p.shape}")
        if not np.isfinite(p).all():
            raise ValidationError("point coordinates must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def has_duplicates(self) -> bool:
        return np.unique(self.points, axis=0).shape[0] < self.n

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return NotImplemented
        return np.array_equal(self.points, other.points)


def euclidean(a, b):
    """Euclidean distance along the last axis, with broadcasting.

    Every distance in the package goes through this kernel so the matrix and
    point-cloud code paths produce bit-identical values.
    """
    return np.sqrt(np.square(a - b).sum(axis=-1))


def similarity_to_dissimilarity(w: WeightedGraph, rule: str = "reciprocal") -> DissimilarityMatrix:
    """Convert weights to dissimilarities.

    ``rule="reciprocal"`` gives ``1/W`` (zero weight -> ``inf``);
    ``rule="one-minus"`` gives ``1 - W`` and requires every weight <= 1.
    """
    W = w.dense()
    if rule == "reciprocal":
        with np.errstate(divide="ignore"):
            M = np.where(W > 0, 1.0 / np.where(W > 0, W, 1.0), INFINITE)
    elif rule == "one-minus":
        over = np.argwhere(W > 1)
        if over.size:
            i, j = (int(v) for v in over[0])
            raise DomainError(f"one-minus rule needs weights <= 1; W[{i}, {j}] = {W[i, j]!r}")
        M = 1.0 - W
    else:
        raise DomainError(f"unknown similarity rule {rule!r}")
    np.fill_diagonal(M, 0.0)
    return DissimilarityMatrix(M)


def dissimilarity_to_similarity(m: DissimilarityMatrix, rule: str = "reciprocal", sigma: float | None = None) -> WeightedGraph:
    """Convert dissimilarities to weights.

    ``rule="reciprocal"`` gives ``1/M`` (``inf`` -> 0); ``rule="gaussian"``
    gives ``exp(-M * sigma**2)``, exactly as written, not ``exp(-M**2/sigma**2)``.
    """
    M = np.array(m.values)
    off = ~np.eye(m.n, dtype=bool)
    if rule == "reciprocal":
        zero = np.argwhere((M == 0) & off)
        if zero.size:
            i, j = (int(v) for v in zero[0])
            raise DomainError(f"reciprocal rule needs positive dissimilarities; M[{i}, {j}] = 0")
        with np.errstate(divide="ignore"):
            W = np.where(off, 1.0 / np.where(off, M, 1.0), 0.0)
    elif rule == "gaussian":
        if sigma is None or not sigma > 0:
            raise DomainError(f"gaussian rule needs sigma > 0, got {sigma}")
        W = np.exp(-M * sigma**2)
    else:
        raise DomainError(f"unknown dissimilarity rule {rule!r}")
    np.fill_diagonal(W, 0.0)
    return WeightedGraph(W)


def pairwise_distances(p: PointCloud) -> DissimilarityMatrix:
    """Dense Euclidean distance matrix.

    Coincident points give zero off-diagonal entries; a
    :class:`DuplicatePointsWarning` is issued and the result's
    ``has_duplicates`` flag is set.
    """
    X = p.points
    n = p.n
    M = np.empty((n, n))
    rows = max(1, _CHUNK_ELEMENTS // max(1, n * p.dim))
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        M[start:stop] = euclidean(X[start:stop, None, :], X[None, :, :])
    np.fill_diagonal(M, 0.0)
    out = DissimilarityMatrix(M)
    if out.has_duplicates:
        warnings.warn("point cloud contains coincident points", DuplicatePointsWarning, stacklevel=2)
    return out
