"""Acceptance criteria, one test (and one PASS/FAIL summary line) per criterion.

Each test records its outcome through the ``criterion`` fixture before
asserting, so the terminal summary lists every criterion even when some fail.
"""

import os
import time

import numpy as np
import pytest

from conftest import brute_two_nn
from netdim import io as nio
from netdim.cli import main
from netdim.constructors import NoiseSpec, SamplerSpec, cube_gap_volume, default_k, flip_noise, knn_graph, rng, sample
from netdim.datasets import load_standin, standin_path
from netdim.graph import PointCloud, UnweightedGraph, dissimilarity_to_similarity, pairwise_distances
from netdim.pipeline import SweepConfig, sweep, weighted_estimate
from netdim.spectral import build_laplacian, spectral_embed, spectrum
from netdim.twonn import (
    NeighbourRatios,
    estimate_dimension,
    neighbour_ratios_from_dissimilarity,
    neighbour_ratios_from_points,
)

SEEDS = range(5)


def cube_matrix(d, n, seed):
    return pairwise_distances(sample(SamplerSpec("cube", d, n, seed=seed)))


@pytest.fixture(scope="module")
def cube25_matrix():
    return cube_matrix(25, 3000, 0)


def test_c1_weighted_full_scale(criterion, cube25_matrix):
    t0 = time.perf_counter()
    vals = [weighted_estimate(cube25_matrix).d_star]
    vals += [weighted_estimate(cube_matrix(25, 3000, s)).d_star for s in SEEDS[1:]]
    elapsed = time.perf_counter() - t0
    hits = sum(17 <= v <= 20 for v in vals)
    ok = hits >= 4 and elapsed < 30
    criterion("1 weighted twoNN N=3000 d=25", ok,
              f"d_star={[round(v, 2) for v in vals]} in [17,20]: {hits}/5, {elapsed:.1f}s")
    assert ok


def test_c2_weighted_small_n(criterion):
    t0 = time.perf_counter()
    vals = [weighted_estimate(cube_matrix(25, 300, s)).d_star for s in SEEDS]
    elapsed = time.perf_counter() - t0
    hits = sum(15 <= v <= 18.5 for v in vals)
    ok = hits >= 4 and elapsed < 2
    criterion("2 weighted twoNN N=300 d=25", ok,
              f"d_star={[round(v, 2) for v in vals]} in [15,18.5]: {hits}/5, {elapsed:.2f}s")
    assert ok


def test_c3_volume_table(criterion):
    table = [(10, 0.135, 5e-4), (15, 0.0440, 5e-4), (25, 0.0047, 2e-4)]
    parts = []
    ok = True
    for d, want, tol in table:
        got = cube_gap_volume(d, 0.1)
        good = abs(got - want) <= tol
        ok &= good
        parts.append(f"d={d}: {got:.6f} vs {want} ({'ok' if good else 'off by ' + format(abs(got - want), '.6f')})")
    criterion("3 volume table", ok, "; ".join(parts))
    assert ok


def test_c4_estimator_oracle(criterion):
    t0 = time.perf_counter()
    worst = {}
    for d in (2, 5, 10):
        errs = []
        for seed in SEEDS:
            u = rng(1000 * d + seed).random(10_000)
            mu = (1.0 - u) ** (-1.0 / d)
            idx = np.zeros(len(mu), dtype=int)
            r = NeighbourRatios(r1=np.ones_like(mu), r2=mu, mu=mu, order=np.argsort(mu, kind="stable"),
                                nn1=idx, nn2=idx)
            errs.append(abs(estimate_dimension(r).d_star - d) / d)
        worst[d] = max(errs)
    elapsed = time.perf_counter() - t0
    ok = all(v < 0.05 for v in worst.values()) and elapsed < 5
    criterion("4 estimator oracle", ok,
              f"max rel err {', '.join(f'd={d}: {v:.4f}' for d, v in worst.items())}, {elapsed:.2f}s")
    assert ok


def test_c5_laplacian_analytics(criterion):
    P3 = UnweightedGraph.from_pairs(3, [(0, 1), (1, 2)])
    K4 = UnweightedGraph.from_pairs(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    T2 = UnweightedGraph.from_pairs(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    p3 = spectrum(build_laplacian(P3), 3).eigenvalues
    k4 = spectrum(build_laplacian(K4), 4).eigenvalues
    t2 = spectrum(build_laplacian(T2), 6)
    ok = (
        np.allclose(p3, [0, 1, 3], rtol=0, atol=1e-8)
        and np.allclose(k4, [0, 4, 4, 4], rtol=0, atol=1e-8)
        and t2.zero_multiplicity == 2
        and np.allclose(t2.eigenvalues[:2], 0, atol=1e-8)
    )
    criterion("5 Laplacian analytics", ok, f"P3={np.round(p3, 12)} K4={np.round(k4, 12)} zeros={t2.zero_multiplicity}")
    assert ok


def test_c6_unweighted_pipeline(criterion):
    t0 = time.perf_counter()
    chosen = []
    for seed in SEEDS:
        p = sample(SamplerSpec("gauss", 10, 1500, seed=seed))
        res = sweep(knn_graph(p, default_k(1500)), SweepConfig(s_min=5, s_max=16))
        chosen.append(res.chosen_dimension)
    elapsed = time.perf_counter() - t0
    hits = sum(c is not None and abs(c - 10) <= 2 for c in chosen)
    ok = hits >= 3 and elapsed < 60
    criterion("6 unweighted pipeline N=1500 d=10", ok, f"chosen={chosen}: {hits}/5 within 10+-2, {elapsed:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def noise_runs():
    """Clean and noisy sweeps for the d=15 cube at N=4000, three seeds."""
    t0 = time.perf_counter()
    cfg = SweepConfig(s_min=5, s_max=30, warm_start=True)
    runs = []
    for seed in range(3):
        p = sample(SamplerSpec("cube", 15, 4000, seed=seed))
        g = knn_graph(p, default_k(4000))
        clean = sweep(g, cfg)
        noisy = sweep(flip_noise(g, NoiseSpec(0.01, seed=seed)), cfg)
        runs.append((clean, noisy))
    return runs, time.perf_counter() - t0


def test_c7_noise_robustness(criterion, noise_runs):
    runs, elapsed = noise_runs
    parts = []
    ok = elapsed < 180
    for clean, noisy in runs:
        if not (clean.has_plateau and noisy.has_plateau):
            ok = False
            parts.append("no plateau")
            continue
        rel = abs(noisy.plateau_mean - clean.plateau_mean) / clean.plateau_mean
        ok &= rel <= 0.2
        parts.append(f"{clean.plateau_mean:.2f}->{noisy.plateau_mean:.2f} ({rel:.1%})")
    criterion("7 noise robustness N=4000 d=15 p=0.01", ok, f"{'; '.join(parts)}, {elapsed:.0f}s")
    assert ok


def test_noisy_cube_dimension_near_15(noise_runs):
    runs, _ = noise_runs
    for _, noisy in runs:
        assert noisy.has_plateau and abs(noisy.chosen_dimension - 15) <= 0.2 * 15


def test_c8_no_decisive_spectral_gap(criterion, cube25_matrix):
    t0 = time.perf_counter()
    w = dissimilarity_to_similarity(cube25_matrix, "reciprocal")
    rep = spectrum(build_laplacian(w), 27)
    nz = rep.nonzero
    ratio = nz[25] / nz[24]
    d_star = weighted_estimate(cube25_matrix).d_star
    ok = ratio < 1.5 and 17 <= d_star <= 20
    criterion("8 spectral gap contrast", ok,
              f"lambda26/lambda25={ratio:.4f}, twoNN d_star={d_star:.2f}, {time.perf_counter() - t0:.1f}s")
    assert ok


def test_c9_exact_invariances(criterion):
    t0 = time.perf_counter()
    parts = {}

    M = cube_matrix(5, 300, 0)
    a = estimate_dimension(neighbour_ratios_from_dissimilarity(M)).d_curve
    b = estimate_dimension(neighbour_ratios_from_dissimilarity(M.scaled(7.0))).d_curve
    same = np.array_equal(a, b, equal_nan=True)
    parts["scale x7 bit-identical"] = (same, f"{int((a != b).sum())}/{len(a)} d_i differ, max rel {np.nanmax(np.abs(b / a - 1)):.1e}")

    X = sample(SamplerSpec("cube", 4, 400, seed=1)).points
    base = np.sort(neighbour_ratios_from_points(PointCloud(X)).mu)
    perm_ok = True
    for s in range(5):
        perm = rng(s).permutation(len(X))
        perm_ok &= np.array_equal(np.sort(neighbour_ratios_from_points(PointCloud(X[perm])).mu), base)
    parts["permutation multiset"] = (perm_ok, "")

    g = knn_graph(sample(SamplerSpec("cube", 3, 500, seed=2)), 15)
    G = spectral_embed(g, 10).coordinates
    dev = float(np.abs(G.T @ G - np.eye(10)).max())
    parts["orthonormality"] = (dev <= 1e-8, f"{dev:.1e}")

    nn_ok = 0
    gen = rng(77)
    for _ in range(100):
        n = int(gen.integers(4, 80))
        dim = int(gen.integers(1, 6))
        Y = gen.random((n, dim))
        r = neighbour_ratios_from_points(PointCloud(Y))
        r1, r2, j1, j2 = brute_two_nn(Y)
        nn_ok += bool(np.array_equal(r.r1, r1) and np.array_equal(r.r2, r2) and np.array_equal(r.nn1, j1)
                      and np.array_equal(r.nn2, j2))
    parts["brute-force NN"] = (nn_ok == 100, f"{nn_ok}/100")

    elapsed = time.perf_counter() - t0
    ok = all(v[0] for v in parts.values()) and elapsed < 10
    detail = "; ".join(f"{k}={'ok' if v[0] else 'FAIL'}{' ' + v[1] if v[1] else ''}" for k, v in parts.items())
    criterion("9 exact invariances", ok, f"{detail}; {elapsed:.1f}s")
    assert ok


def _replay_check(tmp_path, argv):
    """Run ``argv``, then replay its manifest and compare every artefact byte for byte."""
    code = main(argv)
    out = argv[argv.index("--output") + 1]
    manifest = out + ".manifest"
    data = nio.read_keyvalue(manifest)
    paths = [manifest] + [data[k] for k in sorted(data) if k.startswith("output.")]
    before = {p: open(p, "rb").read() for p in paths}
    for p in paths[1:]:
        os.remove(p)
    code2 = main(["replay", "--manifest", manifest])
    after = {p: open(p, "rb").read() if os.path.exists(p) else None for p in paths}
    return code == code2 and before == after


def test_c10_replay_every_subcommand(criterion, tmp_path):
    t = lambda name: str(tmp_path / name)  # noqa: E731
    runs = {
        "gen": ["gen", "--dist", "gauss", "--d", "4", "--n", "300", "--seed", "3", "--output", t("pts.csv")],
        "knn": ["knn", "--input", t("pts.csv"), "--output", t("knn.txt")],
        "geometric": ["geometric", "--input", t("pts.csv"), "--r", "1.0", "--output", t("geo.txt")],
        "perturb": ["perturb", "--input", t("knn.txt"), "--p", "0.01", "--seed", "5", "--output", t("noisy.txt")],
        "volume": ["volume", "--d", "15", "--r", "0.1", "--output", t("vol.txt")],
        "spectrum": ["spectrum", "--input", t("knn.txt"), "--m", "10", "--output", t("spec.csv")],
        "embed": ["embed", "--input", t("knn.txt"), "--k", "4", "--output", t("emb.csv")],
        "estimate-weighted": ["estimate-weighted", "--input", t("pts.csv"), "--output", t("curve.csv")],
        "estimate-unweighted": ["estimate-unweighted", "--input", t("noisy.txt"), "--s-max", "10",
                                "--output", t("sweep.csv")],
        "nn-hist": ["nn-hist", "--input", t("pts.csv"), "--bins", "12", "--output", t("hist.csv")],
    }
    results = {name: _replay_check(tmp_path, argv) for name, argv in runs.items()}
    ok = all(results.values())
    bad = [k for k, v in results.items() if not v]
    criterion("10 manifest replay", ok, f"{sum(results.values())}/{len(results)} subcommands byte-identical"
              + (f", differing: {bad}" if bad else ""))
    assert ok


def test_standin_pipeline(criterion, tmp_path):
    p = load_standin()
    est = weighted_estimate(pairwise_distances(p))
    res = sweep(knn_graph(p, default_k(p.n)), SweepConfig(s_min=2, s_max=20))
    out = str(tmp_path / "standin_sweep.csv")
    g = str(tmp_path / "standin_knn.txt")
    cli_ok = main(["knn", "--input", str(standin_path()), "--output", g]) == 0
    cli_ok &= main(["estimate-unweighted", "--input", g, "--s-max", "20", "--output", out]) == 0
    ok = (np.isfinite(est.d_star) and res.has_plateau and cli_ok
          and all(np.isfinite(r.d_star) for r in res.records))
    criterion("stand-in CSV pipeline", ok,
              f"weighted d_star={est.d_star:.2f}, sweep chosen={res.chosen_dimension} plateau s={res.plateau}")
    assert ok


@pytest.mark.slow
def test_full_scale_gaussian_sweep_d25(criterion):
    p = sample(SamplerSpec("gauss", 25, 3000, seed=0))
    res = sweep(knn_graph(p, default_k(3000)), SweepConfig(s_min=15, s_max=30))
    ok = res.has_plateau and 22 <= res.chosen_dimension <= 27
    criterion("6 (slow) full-scale sweep N=3000 d=25", ok,
              f"chosen={res.chosen_dimension} plateau_mean={res.plateau_mean}")
    assert ok


@pytest.mark.slow
def test_full_scale_noise_n17000(criterion):
    cfg = SweepConfig(s_min=5, s_max=30, warm_start=True)
    p = sample(SamplerSpec("cube", 15, 17000, seed=0))
    g = knn_graph(p, default_k(17000))
    clean = sweep(g, cfg)
    noisy = sweep(flip_noise(g, NoiseSpec(0.01, seed=0)), cfg)
    ok = clean.has_plateau and noisy.has_plateau
    ok = ok and abs(noisy.plateau_mean - clean.plateau_mean) / clean.plateau_mean <= 0.2
    criterion("7 (slow) full-scale noise N=17000", ok, f"clean={clean.plateau_mean} noisy={noisy.plateau_mean}")
    assert ok
