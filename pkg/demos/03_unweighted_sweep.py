"""Dimension of an unweighted KNN graph by embedding and twoNN.

For each trial dimension s the graph is spectrally embedded into R^s and
twoNN runs on the embedded points.  Small s reproduces s; once s is
large enough the estimate levels off.
"""
# %%
from netdim import SamplerSpec, SweepConfig, default_k, knn_graph, sample, sweep

N = 1500
p = sample(SamplerSpec("gauss", 10, N, seed=0))
g = knn_graph(p, default_k(N))
print(f"KNN graph: n={g.n}, K={default_k(N)}, edges={len(g.edges)}")

# %%
res = sweep(g, SweepConfig(s_min=2, s_max=16, stop_at_plateau=False))
for r in res.records:
    print(f"s={r.s:2d}  d*={r.d_star:6.2f}  [{r.d_min:.2f}, {r.d_max:.2f}]")

# %%
print("plateau at s =", res.plateau, "-> chosen dimension", res.chosen_dimension)
