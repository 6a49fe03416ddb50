"""Pairwise distances: Euclidean, squared Euclidean and correlation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Dataset, DegenerateVector, DimensionMismatch, DistanceMetric


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    values: np.ndarray
    metric: DistanceMetric

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("distance matrix must be square")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "metric", DistanceMetric.parse(self.metric))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def subset(self, idx) -> "DistanceMatrix":
        idx = np.asarray(idx)
        return DistanceMatrix(self.values[np.ix_(idx, idx)], self.metric)


def _pair(p, q):
    p = np.asarray(p, dtype=np.float64).ravel()
    q = np.asarray(q, dtype=np.float64).ravel()
    if p.shape != q.shape:
        raise DimensionMismatch(f"vectors have lengths {p.size} and {q.size}")
    return p, q


def squared_euclidean(p, q) -> float:
    p, q = _pair(p, q)
    diff = p - q
    return float(diff @ diff)


def euclidean(p, q) -> float:
    return float(np.sqrt(squared_euclidean(p, q)))


def _center_rows(X: np.ndarray) -> np.ndarray:
    """Mean-center each row and scale it to unit norm."""
    if X.shape[1] < 2:
        raise DegenerateVector("correlation distance needs at least 2 components")
    Z = X - X.mean(axis=1, keepdims=True)
    norms = np.sqrt((Z * Z).sum(axis=1))
    bad = np.flatnonzero(norms == 0.0)
    if bad.size:
        raise DegenerateVector(f"row {bad[0]} is constant; correlation distance undefined",
                               index=int(bad[0]))
    return Z / norms[:, None]


def correlation(p, q) -> float:
    p, q = _pair(p, q)
    try:
        Z = _center_rows(np.vstack([p, q]))
    except DegenerateVector as exc:
        raise DegenerateVector(f"constant vector ({'p' if exc.index == 0 else 'q'})",
                               index=exc.index) from None
    return float(np.clip(1.0 - Z[0] @ Z[1], 0.0, 2.0))


def pairwise_array(X: np.ndarray, metric, backend: str | None = None) -> np.ndarray:
    """Distance matrix of the rows of ``X``; bit-exactly symmetric."""
    metric = DistanceMetric.parse(metric)
    X = np.ascontiguousarray(X, dtype=np.float64)
    if metric is DistanceMetric.CORRELATION:
        return _kernels.get("pairwise_correlation", backend)(np.ascontiguousarray(_center_rows(X)))
    sq = _kernels.get("pairwise_sqeuclidean", backend)(X)
    if metric is DistanceMetric.EUCLIDEAN:
        return np.sqrt(sq)
    return sq


def pairwise(d: Dataset | np.ndarray, metric) -> DistanceMatrix:
    X = d.values if isinstance(d, Dataset) else np.asarray(d, dtype=np.float64)
    metric = DistanceMetric.parse(metric)
    return DistanceMatrix(pairwise_array(X, metric), metric)
