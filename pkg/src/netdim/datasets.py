"""Bundled synthetic data."""

from __future__ import annotations

from importlib import resources

import numpy as np

from .constructors import rng
from .graph import PointCloud

STANDIN_SEED = 100


def make_standin(n: int = 500, seed: int = STANDIN_SEED) -> PointCloud:
    """Points on a curved 3-dimensional manifold in R^20.

    A uniform sample of the unit 3-cube is pushed through a fixed random
    linear map (10 coordinates) and a random sinusoidal map (10 coordinates).
    It stands in for image data whose intrinsic dimension is a few units.
    """
    g = rng(seed)
    latent = g.random((n, 3))
    linear = g.standard_normal((3, 10))
    freq = g.standard_normal((3, 10)) * 2
    return PointCloud(np.c_[latent @ linear, np.sin(latent @ freq)])


def standin_path():
    """Path of the bundled CSV copy of :func:`make_standin`."""
    return resources.files("netdim") / "data" / "standin_points.csv"


def load_standin() -> PointCloud:
    from .io import load_points

    with resources.as_file(standin_path()) as path:
        return load_points(path)
