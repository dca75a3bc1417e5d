"""Robustness to missing and spurious edges.

Flip every node pair of a KNN graph with probability p and rerun the sweep.
"""
# %%
from netdim import NoiseSpec, SamplerSpec, SweepConfig, default_k, flip_noise, knn_graph, sample, sweep

N = 4000
g = knn_graph(sample(SamplerSpec("cube", 15, N, seed=0)), default_k(N))
cfg = SweepConfig(s_min=5, s_max=30, warm_start=True)

# %%
for p in (0.0, 0.005, 0.01):
    h = flip_noise(g, NoiseSpec(p, seed=1))
    res = sweep(h, cfg)
    print(f"p={p:<6} edges={len(h.edges):7d}  plateau s={res.plateau}  mean={res.plateau_mean:.2f}")
