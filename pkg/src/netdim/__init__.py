"""Intrinsic dimension of weighted and unweighted networks.

Weighted networks (or any dissimilarity matrix) go straight to the twoNN
estimator.  Unweighted networks are first spectrally embedded into R^s for a
range of trial dimensions ``s``; the dimension is read off where the twoNN
estimate stops changing.
"""

__version__ = "0.1.0"

from .constructors import (
    NoiseSpec,
    SamplerSpec,
    cube_gap_volume,
    default_k,
    flip_noise,
    geometric_graph,
    knn_graph,
    sample,
)
from .errors import (
    DegenerateInputError,
    DisconnectedGraphError,
    DomainError,
    EigensolverError,
    EstimationError,
    NetdimError,
    ParseError,
    ValidationError,
)
from .graph import (
    DissimilarityMatrix,
    PointCloud,
    UnweightedGraph,
    WeightedGraph,
    dissimilarity_to_similarity,
    pairwise_distances,
    similarity_to_dissimilarity,
)
from .pipeline import SweepConfig, SweepResult, algorithm1, sweep, weighted_estimate
from .spectral import Embedding, Laplacian, SpectrumReport, build_laplacian, spectral_embed, spectrum
from .twonn import (
    DimensionEstimate,
    NeighbourRatios,
    estimate_dimension,
    neighbour_ratios_from_dissimilarity,
    neighbour_ratios_from_points,
    nn_distance_histogram,
)
