"""The full CSV path on the bundled stand-in data set.

500 points in R^20 that lie on a curved 3-dimensional sheet.  The weighted
estimate uses distances directly; the unweighted one only sees a KNN graph.
"""
# %%
from netdim import SweepConfig, default_k, knn_graph, pairwise_distances, sweep, weighted_estimate
from netdim.datasets import load_standin, standin_path

print("data file:", standin_path())
p = load_standin()

# %%
est = weighted_estimate(pairwise_distances(p))
print(f"weighted twoNN: d*={est.d_star:.2f}")

# %%
res = sweep(knn_graph(p, default_k(p.n)), SweepConfig(s_min=2, s_max=20))
for r in res.records:
    print(f"s={r.s:2d}  d*={r.d_star:.2f}")
print("chosen dimension:", res.chosen_dimension)
