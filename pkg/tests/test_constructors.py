import math

import numpy as np
import pytest

from netdim.constructors import (
    NoiseSpec,
    SamplerSpec,
    cube_gap_volume,
    default_k,
    flip_noise,
    geometric_graph,
    knn_graph,
    rng,
    sample,
)
from netdim.errors import DomainError
from netdim.graph import PointCloud, UnweightedGraph


def brute_knn_edges(X, k):
    n = len(X)
    edges = set()
    for i in range(n):
        d = [(math.dist(X[i], X[j]), j) for j in range(n) if j != i]
        for _, j in sorted(d)[:k]:
            edges.add((min(i, j), max(i, j)))
    return edges


def brute_geometric_edges(X, r):
    n = len(X)
    return {(i, j) for i in range(n) for j in range(i + 1, n) if math.dist(X[i], X[j]) < r}


def test_sampler_support_and_determinism():
    p = sample(SamplerSpec("cube", 4, 500, seed=3))
    assert p.points.shape == (500, 4) and p.points.min() >= 0 and p.points.max() < 1
    assert p == sample(SamplerSpec("cube", 4, 500, seed=3))
    assert p != sample(SamplerSpec("cube", 4, 500, seed=4))
    q = sample(SamplerSpec("gauss", 1, 10_000, seed=1)).points[:, 0]
    assert abs(q.mean()) < 4 / math.sqrt(10_000)
    assert abs(q.var() - 1) < 0.1
    with pytest.raises(DomainError):
        SamplerSpec("sphere", 2, 10)


def test_default_k():
    assert default_k(3000) == 240
    assert default_k(17000) == 292
    assert default_k(3) == 32


def test_knn_line():
    g = knn_graph(PointCloud([[0.0], [1.0], [3.0]]), 1)
    assert g.edge_set() == {(0, 1), (1, 2)}


def test_knn_complete_when_k_is_n_minus_1():
    g = knn_graph(sample(SamplerSpec("cube", 3, 10, seed=0)), 9)
    assert len(g.edges) == 45


def test_knn_matches_brute_force():
    X = sample(SamplerSpec("cube", 5, 300, seed=2)).points
    g = knn_graph(PointCloud(X), 20)
    assert g.edge_set() == brute_knn_edges(X, 20)
    assert g.degrees().min() >= 20


def test_knn_ties_resolved_by_index():
    X = np.indices((4, 4)).reshape(2, -1).T.astype(float)
    assert knn_graph(PointCloud(X), 3).edge_set() == brute_knn_edges(X, 3)


def test_knn_domain():
    p = PointCloud([[0.0], [1.0], [2.0]])
    with pytest.raises(DomainError):
        knn_graph(p, 3)


def test_geometric_examples():
    p = PointCloud([[0.0], [1.0], [3.0]])
    assert geometric_graph(p, 1.5).edge_set() == {(0, 1)}
    assert geometric_graph(p, 1.0).edge_set() == set()
    full = geometric_graph(p, 10.0)
    assert len(full.edges) == 3


@pytest.mark.parametrize("r", [0.1, 0.8, 1.2])
def test_geometric_matches_brute_force(r):
    X = sample(SamplerSpec("cube", 10, 200, seed=5)).points
    assert geometric_graph(PointCloud(X), r).edge_set() == brute_geometric_edges(X, r)


def test_geometric_monotone_in_radius():
    p = sample(SamplerSpec("cube", 3, 150, seed=6))
    prev = set()
    for r in (0.05, 0.1, 0.2, 0.4):
        cur = geometric_graph(p, r).edge_set()
        assert prev <= cur
        prev = cur


def test_cube_gap_volume_values():
    closed = 18 * (1 / 3) ** 8 * 0.1 + 0.8**9
    assert cube_gap_volume(10, 0.1) == pytest.approx(closed, rel=1e-15)
    assert abs(cube_gap_volume(15, 0.1) - 0.044) <= 5e-4
    assert abs(cube_gap_volume(25, 0.1) - 0.0047) <= 5e-5
    vols = [cube_gap_volume(d, 0.1) for d in range(10, 31)]
    assert all(a > b for a, b in zip(vols, vols[1:]))
    for bad in [(1, 0.1), (3, 0.0), (3, 0.5)]:
        with pytest.raises(DomainError):
            cube_gap_volume(*bad)


def test_flip_identity_and_complement():
    g = knn_graph(sample(SamplerSpec("cube", 2, 60, seed=1)), 4)
    assert flip_noise(g, NoiseSpec(0.0, seed=3)) == g
    comp = flip_noise(g, NoiseSpec(1.0, seed=3))
    n = g.n
    assert comp.edge_set() == {(i, j) for i in range(n) for j in range(i + 1, n)} - g.edge_set()
    assert flip_noise(comp, NoiseSpec(1.0, seed=8)) == g


def test_flip_count_is_binomial():
    n, p = 200, 0.01
    g = UnweightedGraph(n, np.empty((0, 2), dtype=np.int64))
    pairs = n * (n - 1) // 2
    sd = math.sqrt(pairs * p * (1 - p))
    for seed in range(20):
        out = flip_noise(g, NoiseSpec(p, seed=seed))
        assert abs(len(out.edges) - pairs * p) < 4 * sd
        assert np.all(out.edges[:, 0] < out.edges[:, 1])


def test_flip_deterministic():
    g = knn_graph(sample(SamplerSpec("cube", 2, 200, seed=1)), 5)
    a = flip_noise(g, NoiseSpec(0.05, seed=11))
    assert a == flip_noise(g, NoiseSpec(0.05, seed=11))
    assert a != flip_noise(g, NoiseSpec(0.05, seed=12))


def test_rng_is_counter_based():
    assert isinstance(rng(0).bit_generator, np.random.Philox)
    assert np.array_equal(rng(7).random(5), rng(7).random(5))
