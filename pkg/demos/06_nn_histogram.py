"""Nearest-neighbour distances after spectral embedding.

The first-neighbour distances of the embedded points concentrate around a
typical value, much like points sampled in a high-dimensional space.
"""
# %%
from netdim import (
    PointCloud,
    SamplerSpec,
    default_k,
    knn_graph,
    neighbour_ratios_from_points,
    nn_distance_histogram,
    sample,
    spectral_embed,
)

N = 3000
g = knn_graph(sample(SamplerSpec("cube", 25, N, seed=0)), default_k(N))
G = spectral_embed(g, 30).coordinates
r = neighbour_ratios_from_points(PointCloud(G))

# %%
h = nn_distance_histogram(r, 15)
top = h.counts.max()
for lo, hi, c in zip(h.bin_left, h.bin_right, h.counts):
    print(f"[{lo:.4f}, {hi:.4f})  {c:5d}  {'#' * int(50 * c / top)}")
print(f"sd/mean of r1 = {r.r1.std() / r.r1.mean():.3f}")
