"""Graph Laplacian ``L = D - W``, its low spectrum, and spectral embedding.

Node ``i`` is placed at row ``i`` of ``G = [g1 .. gk]``, the eigenvectors for
the ``k`` smallest nonzero eigenvalues of ``L``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .constructors import rng
from .errors import DisconnectedGraphError, DomainError, EigensolverError
from .graph import UnweightedGraph, WeightedGraph

__all__ = [
    "DENSE_LIMIT",
    "ZERO_TOL",
    "Laplacian",
    "SpectrumReport",
    "Embedding",
    "build_laplacian",
    "spectrum",
    "spectral_embed",
    "count_components",
    "giant_component",
]

# graphs up to this size use a dense symmetric eigensolver
DENSE_LIMIT = 2000
# eigenvalue counts as zero below ZERO_TOL * (2 * max degree)
ZERO_TOL = 1e-8

SOLVERS = ("auto", "dense", "lanczos")


@dataclass(frozen=True, eq=False)
class Laplacian:
    """``matrix`` is dense for dense weights, CSR otherwise."""

    matrix: np.ndarray | sp.csr_matrix
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    @property
    def lambda_max_bound(self) -> float:
        """Cheap upper bound on the largest eigenvalue (Gershgorin)."""
        return 2.0 * float(self.degrees.max(initial=0.0))

    @property
    def zero_threshold(self) -> float:
        return ZERO_TOL * self.lambda_max_bound

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.array(self.matrix)


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    zero_multiplicity: int
    threshold: float

    @property
    def nonzero(self) -> np.ndarray:
        return self.eigenvalues[self.eigenvalues > self.threshold]


@dataclass(frozen=True, eq=False)
class Embedding:
    """``coordinates[i]`` is the position of node ``i`` in R^k."""

    coordinates: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n(self) -> int:
        return self.coordinates.shape[0]

    @property
    def k(self) -> int:
        return self.coordinates.shape[1]


def _weights(g):
    if isinstance(g, UnweightedGraph):
        return g.adjacency()
    if isinstance(g, WeightedGraph):
        return g.weights
    raise TypeError(f"expected WeightedGraph or UnweightedGraph, got {type(g).__name__}")


def build_laplacian(g: WeightedGraph | UnweightedGraph) -> Laplacian:
    W = _weights(g)
    if sp.issparse(W):
        deg = np.asarray(W.sum(axis=1)).ravel()
        L = (sp.diags(deg) - W).tocsr()
    else:
        deg = W.sum(axis=1)
        L = -np.array(W)
        L[np.diag_indices_from(L)] = deg
        L.setflags(write=False)
    deg.setflags(write=False)
    return Laplacian(matrix=L, degrees=deg)


def count_components(g: WeightedGraph | UnweightedGraph) -> tuple[int, np.ndarray]:
    """Number of connected components and the per-node component label."""
    W = _weights(g)
    return connected_components(sp.csr_matrix(W), directed=False)


def giant_component(g: UnweightedGraph) -> tuple[UnweightedGraph, np.ndarray]:
    """Largest connected component (lowest label on ties) and its original node ids."""
    _, labels = count_components(g)
    sizes = np.bincount(labels)
    nodes = np.flatnonzero(labels == int(sizes.argmax()))
    return g.subgraph(nodes), nodes


def _start_vector(n, seed):
    return rng(seed).random(n) + 0.5


def _lowest(lap: Laplacian, m: int, vectors: bool, solver: str, seed: int):
    n = lap.n
    if solver not in SOLVERS:
        raise DomainError(f"solver must be one of {SOLVERS}, got {solver!r}")
    use_dense = solver == "dense" or (solver == "auto" and n <= DENSE_LIMIT) or m >= n - 1
    if use_dense:
        w = scipy.linalg.eigh(
            lap.dense(),
            eigvals_only=not vectors,
            subset_by_index=[0, m - 1],
            driver="evr",
        )
        return w if vectors else (w, None)
    A = lap.matrix if lap.is_sparse else sp.csr_matrix(lap.matrix)
    maxiter = max(1000, 20 * n)
    try:
        w, V = eigsh(A, k=m, which="SA", v0=_start_vector(n, seed), maxiter=maxiter, tol=0)
    except ArpackNoConvergence as exc:
        if len(exc.eigenvalues):
            res = np.linalg.norm(A @ exc.eigenvectors - exc.eigenvectors * exc.eigenvalues, axis=0).max()
        else:
            res = float("inf")
        raise EigensolverError(maxiter, float(res)) from exc
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def spectrum(lap: Laplacian, m: int, *, solver: str = "auto", seed: int = 0) -> SpectrumReport:
    """The ``m`` smallest eigenvalues, ascending, and how many of them are zero."""
    if not 1 <= m <= lap.n:
        raise DomainError(f"m must lie in [1, {lap.n}], got {m}")
    w, _ = _lowest(lap, m, vectors=False, solver=solver, seed=seed)
    w = np.sort(np.asarray(w, dtype=float))
    w.setflags(write=False)
    thr = lap.zero_threshold
    return SpectrumReport(eigenvalues=w, zero_multiplicity=int((w <= thr).sum()), threshold=thr)


def _fix_signs(V):
    # largest-magnitude entry of each column made positive
    idx = np.abs(V).argmax(axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1
    return V * signs


def spectral_embed(
    g: WeightedGraph | UnweightedGraph,
    k: int,
    *,
    solver: str = "auto",
    seed: int = 0,
) -> Embedding:
    """Embed a connected graph into R^k using the k lowest nontrivial eigenvectors.

    Raises :class:`DisconnectedGraphError` for graphs with several components
    and :class:`DomainError` if ``k > n - 1``.
    """
    n = g.n
    if not 1 <= k <= n - 1:
        raise DomainError(f"embedding dimension must lie in [1, {n - 1}], got {k}")
    n_comp, _ = count_components(g)
    if n_comp > 1:
        raise DisconnectedGraphError(n_comp)
    lap = build_laplacian(g)
    w, V = _lowest(lap, k + 1, vectors=True, solver=solver, seed=seed)
    if w[1] <= lap.zero_threshold:
        raise EigensolverError(0, float(w[1]), "second eigenvalue numerically zero on a connected graph")
    G = np.ascontiguousarray(_fix_signs(V[:, 1:]))
    evals = np.array(w[1:])
    G.setflags(write=False)
    evals.setflags(write=False)
    return Embedding(coordinates=G, eigenvalues=evals)
