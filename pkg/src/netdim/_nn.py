"""Nearest-neighbour search shared by the twoNN estimator and KNN graphs.

Ties in distance are broken by lowest node index, so results never depend
on kd-tree traversal order.  Candidate distances returned by the tree are
recomputed with :func:`netdim.graph.euclidean` so that both the point-cloud
and matrix paths see bit-identical values.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateInputError
from .graph import euclidean

# relative slack when deciding whether a tie straddles the candidate window
_TIE_SLACK = 1e-12
_BLOCK_ELEMENTS = 4_000_000


def workers() -> int:
    """Thread count for kd-tree queries, capped by ``NETDIM_THREADS``."""
    value = os.environ.get("NETDIM_THREADS")
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def _brute_row(X, i, k):
    d = euclidean(X, X[i])
    d[i] = np.inf
    order = np.lexsort((np.arange(len(d)), d))[:k]
    return d[order], order


def kneighbors(X: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Distances and indices of the ``k`` nearest other points of every point.

    Returns two ``(n, k)`` arrays sorted by (distance, index).  Raises
    :class:`DegenerateInputError` if any point coincides with another.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    m = min(n, k + 3)
    _, cand = cKDTree(X).query(X, k=m, workers=workers())
    cand = np.asarray(cand, dtype=np.int64).reshape(n, m)

    out_d = np.empty((n, k))
    out_i = np.empty((n, k), dtype=np.int64)
    block = max(1, _BLOCK_ELEMENTS // (m * X.shape[1]))
    for start in range(0, n, block):
        stop = min(n, start + block)
        c = cand[start:stop]
        d = euclidean(X[c], X[start:stop, None, :])
        d[c == np.arange(start, stop)[:, None]] = np.inf  # self
        order = np.lexsort((c, d), axis=-1)
        d = np.take_along_axis(d, order, axis=-1)
        c = np.take_along_axis(c, order, axis=-1)
        if (d[:, 0] == 0).any():
            i = int(np.flatnonzero(d[:, 0] == 0)[0])
            raise DegenerateInputError(f"point {start + i} coincides with point {int(c[i, 0])}")
        out_d[start:stop] = d[:, :k]
        out_i[start:stop] = c[:, :k]
        if m < n:
            # the true k-th neighbour may tie with a point outside the window
            edge = d[:, m - 2] <= d[:, k - 1] * (1 + _TIE_SLACK)
            for i in np.flatnonzero(edge):
                out_d[start + i], out_i[start + i] = _brute_row(X, start + i, k)
    return out_d, out_i


def two_smallest_per_row(M: np.ndarray, rows_per_block: int = 512):
    """Two smallest off-diagonal entries of each row, lowest index first on ties.

    Returns ``(r1, r2, j1, j2)``.  Entries equal to ``inf`` are never chosen
    unless the row has fewer than two finite entries, which the caller checks.
    """
    n = M.shape[0]
    r1 = np.empty(n)
    r2 = np.empty(n)
    j1 = np.empty(n, dtype=np.int64)
    j2 = np.empty(n, dtype=np.int64)
    for start in range(0, n, rows_per_block):
        stop = min(n, start + rows_per_block)
        rows = np.arange(start, stop)
        block = np.array(M[start:stop], dtype=float)
        block[rows - start, rows] = np.inf
        a = block.argmin(axis=1)
        r1[start:stop] = block[rows - start, a]
        block[rows - start, a] = np.inf
        b = block.argmin(axis=1)
        r2[start:stop] = block[rows - start, b]
        j1[start:stop] = a
        j2[start:stop] = b
    return r1, r2, j1, j2
