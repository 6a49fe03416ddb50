"""Exponential similarity kernels with an arbitrary base.

All kernels evaluate ``base ** (-x)`` as ``exp(-x * ln(base))``. With
``base == math.e`` the log is exactly 1.0, so the natural-exponential kernel
is reproduced bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AffinityRecipe, DistanceMetric, GlobalScale, LocalScale, ZeroScale
from .metrics import DistanceMatrix


@dataclass(frozen=True, eq=False)
class AffinityMatrix:
    values: np.ndarray
    recipe: AffinityRecipe | None = None
    sigma: float | None = None  # resolved global bandwidth, if any

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("affinity matrix must be square")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class LocalScales:
    sigma: np.ndarray
    K: int

    def __post_init__(self):
        sigma = np.array(self.sigma, dtype=np.float64, copy=True)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)


def default_sigma(dm: DistanceMatrix) -> float:
    """Half the median off-diagonal distance (falls back to 1.0 if that is 0)."""
    n = dm.n
    if n < 2:
        return 1.0
    off = dm.values[np.triu_indices(n, k=1)]
    sigma = 0.5 * float(np.median(off))
    return sigma if sigma > 0.0 else 1.0


def _kernel(exponent: np.ndarray, base: float) -> np.ndarray:
    A = np.exp(-exponent * math.log(base))
    np.fill_diagonal(A, 0.0)
    return A


def affinity_global(dm: DistanceMatrix, base: float, sigma: float) -> AffinityMatrix:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not base > 1:
        raise ValueError("base must exceed 1")
    A = _kernel(dm.values / (2.0 * sigma * sigma), base)
    return AffinityMatrix(A, AffinityRecipe(base, GlobalScale(sigma), dm.metric), sigma)


def local_scales(dm: DistanceMatrix, K: int) -> LocalScales:
    """Distance from each point to its K-th nearest other point.

    K is clamped to n - 1. For a squared-Euclidean matrix the scale is the
    plain Euclidean distance (square root of the entry), so that
    ``d / (sigma_i * sigma_j)`` stays dimensionless as in the self-tuning
    kernel ``exp(-|x_i - x_j|^2 / (sigma_i sigma_j))``. Raises ZeroScale
    naming the first point whose K-th neighbor sits at distance zero.
    """
    n = dm.n
    if n < 2:
        raise ValueError("local scaling needs n >= 2")
    if K < 1:
        raise ValueError("K must be >= 1")
    K = min(int(K), n - 1)
    D = dm.values.copy()
    np.fill_diagonal(D, np.inf)
    sigma = np.partition(D, K - 1, axis=1)[:, K - 1]
    if dm.metric is DistanceMetric.SQUARED_EUCLIDEAN:
        sigma = np.sqrt(sigma)
    zero = np.flatnonzero(sigma <= 0.0)
    if zero.size:
        i = int(zero[0])
        raise ZeroScale(f"point {i} has zero distance to its {K}-th neighbor "
                        f"({zero.size} such points); de-duplicate the data", index=i)
    return LocalScales(sigma, K)


def affinity_local(dm: DistanceMatrix, base: float, scales: LocalScales) -> AffinityMatrix:
    if not base > 1:
        raise ValueError("base must exceed 1")
    s = scales.sigma
    zero = np.flatnonzero(~(s > 0.0))
    if zero.size:
        raise ZeroScale(f"local scale of point {zero[0]} is not positive", index=int(zero[0]))
    A = _kernel(dm.values / np.outer(s, s), base)
    return AffinityMatrix(A, AffinityRecipe(base, LocalScale(scales.K), dm.metric))


def build_affinity(dm: DistanceMatrix, recipe: AffinityRecipe) -> AffinityMatrix:
    """Dispatch on the recipe's scaling; resolves the default global sigma."""
    if recipe.is_local:
        return affinity_local(dm, recipe.base, local_scales(dm, recipe.scaling.K))
    sigma = recipe.scaling.sigma
    if sigma is None:
        sigma = default_sigma(dm)
    return affinity_global(dm, recipe.base, sigma)
