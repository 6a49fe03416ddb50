"""Spectral clustering with base-a exponential and locally scaled similarity kernels."""

from .core import (AffinityRecipe, ColumnSpec, Dataset, DistanceMetric, GlobalScale, LocalScale,
                   base_a_sc, new_sc, old_sc, validate_dataset)
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "AffinityRecipe", "ColumnSpec", "Dataset", "DistanceMetric", "GlobalScale", "LocalScale",
    "base_a_sc", "new_sc", "old_sc", "validate_dataset", "BACKEND", "__version__",
]
