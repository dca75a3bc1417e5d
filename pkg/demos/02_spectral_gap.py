"""Why not just read the dimension off the Laplacian spectrum?

Build the inverse-distance weighted graph of a 25-dimensional cloud and look
at the ordered eigenvalues around index 25.
"""
# %%
import numpy as np

from netdim import SamplerSpec, build_laplacian, dissimilarity_to_similarity, pairwise_distances, sample, spectrum

M = pairwise_distances(sample(SamplerSpec("cube", 25, 3000, seed=0)))
W = dissimilarity_to_similarity(M, "reciprocal")
rep = spectrum(build_laplacian(W), 40)
nz = rep.nonzero

# %%
print("zero eigenvalues:", rep.zero_multiplicity)
print("successive ratios lambda_{k+1}/lambda_k for k = 20..30:")
for k in range(20, 31):
    print(f"  k={k}: {nz[k] / nz[k - 1]:.4f}")

# %% [markdown]
# The ratios hug 1 and there is no step at 25, so the spectrum alone gives
# no reason to embed in 25 dimensions.

# %%
print("largest ratio among the first 39:", float(np.max(nz[1:] / nz[:-1])))
