"""k-means, agglomerative clustering and the end-to-end spectral pipeline."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .affinity import build_affinity, default_sigma
from .core import (AffinityRecipe, Dataset, DistanceMetric, GlobalScale, InvalidLinkageMetric,
                   KTooLarge, NumericError, base_a_sc, make_rng, new_sc, old_sc)
from .metrics import DistanceMatrix, pairwise
from .spectral import embed, laplacian, smallest_eigenpairs

LINKAGES = tuple(_kernels.LINKAGE_CODES)
DEFAULT_LINKAGE = "average"
DEFAULT_RESTARTS = 10
DEFAULT_MAX_ITER = 300


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    labels: np.ndarray
    k: int
    algorithm: str
    provenance: dict = field(default_factory=dict)
    inertia: float | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)


def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Rename cluster ids in order of first appearance."""
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(labels.max() + 1, dtype=np.int64)
    remap[np.unique(labels)[order]] = np.arange(order.size)
    return remap[labels]


def kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((X - X[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # every point coincides with a chosen center
            rest = np.setdiff1d(np.arange(n), chosen)
            idx = int(rest[rng.integers(rest.size)])
        chosen.append(idx)
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(axis=1))
    return X[chosen].copy()


def kmeans(points, k: int, seed: int = 0, restarts: int = DEFAULT_RESTARTS,
           max_iter: int = DEFAULT_MAX_ITER, backend: str | None = None) -> ClusteringResult:
    """Lloyd's algorithm from k-means++ seeds; lowest inertia over restarts wins.

    Ties in inertia go to the earliest restart. Empty clusters are re-seeded
    at the point farthest from its centroid.
    """
    X = np.ascontiguousarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} must be between 1 and n={n}")
    if not np.isfinite(X).all():
        raise ValueError("k-means input contains non-finite values")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    lloyd = _kernels.get("lloyd", backend)
    rng = make_rng(seed)
    best = None
    for r in range(restarts):
        centers = kmeans_pp_init(X, k, rng)
        labels, centers, inertia, history = lloyd(X, centers, max_iter)
        if np.any(np.diff(history) > 1e-9 * max(history[0], 1.0)):
            raise NumericError("k-means inertia increased between Lloyd iterations")
        if best is None or inertia < best[1]:
            best = (labels, inertia, r, len(history))
    labels, inertia, r, n_iter = best
    notes = ()
    sizes = np.bincount(labels, minlength=k)
    if (sizes == 0).any():
        notes = (f"{int((sizes == 0).sum())} empty clusters",)
    return ClusteringResult(labels, k, "kmeans",
                            {"seed": int(seed), "restarts": restarts, "best_restart": r,
                             "iterations": n_iter, "max_iter": max_iter},
                            inertia=float(inertia), warnings=notes)


def hierarchical(dm: DistanceMatrix, k: int, linkage: str = DEFAULT_LINKAGE,
                 backend: str | None = None) -> ClusteringResult:
    """Agglomerative clustering cut at ``k`` clusters.

    Each step merges the closest pair of active clusters; among equal
    distances the pair with the lexicographically smallest (i, j) of cluster
    representatives wins. A merged cluster keeps the smaller representative.
    Ward works on squared Euclidean distances (Euclidean input is squared).
    """
    n = dm.n
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} must be between 1 and n={n}")
    if linkage not in _kernels.LINKAGE_CODES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    D = np.array(dm.values, dtype=np.float64)
    if linkage == "ward":
        if dm.metric is DistanceMetric.CORRELATION:
            raise InvalidLinkageMetric("ward linkage requires a Euclidean-family metric")
        if dm.metric is DistanceMetric.EUCLIDEAN:
            D = D * D
    merges = _kernels.get("agglomerate", backend)(D, k, _kernels.LINKAGE_CODES[linkage])
    parent = np.arange(n)
    for a, b in merges:
        parent[b] = a
    # representatives only ever point to smaller indices that were active at merge time
    for i in range(n):
        root = i
        while parent[root] != root:
            root = parent[root]
        parent[i] = root
    labels = _canonical_labels(parent)
    return ClusteringResult(labels, k, "hierarchical",
                            {"linkage": linkage, "metric": dm.metric.value})


def _canonical_order(Y: np.ndarray) -> np.ndarray:
    # row order that does not depend on the input order of the points
    return np.lexsort(np.round(Y, 12).T[::-1])


def spectral_cluster(d: Dataset, recipe: AffinityRecipe, k: int, seed: int = 0,
                     restarts: int = DEFAULT_RESTARTS, dm: DistanceMatrix | None = None) -> ClusteringResult:
    """Distances, affinity, normalized Laplacian, k eigenvectors, k-means.

    Rows of the embedding are put in a canonical order before k-means so the
    seeded initialization does not depend on how the input rows are ordered.
    """
    if dm is None:
        dm = pairwise(d, recipe.metric)
    n = dm.n
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} must be between 1 and n={n}")
    if not recipe.is_local and recipe.scaling.sigma is None:
        recipe = AffinityRecipe(recipe.base, GlobalScale(default_sigma(dm)), recipe.metric)
    A = build_affinity(dm, recipe)
    es = smallest_eigenpairs(laplacian(A), k)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        emb = embed(es)
    order = _canonical_order(emb.coordinates)
    km = kmeans(emb.coordinates[order], k, seed=seed, restarts=restarts)
    labels = np.empty(n, dtype=np.int64)
    labels[order] = km.labels
    labels = _canonical_labels(labels)
    prov = {
        "base": recipe.base,
        "scaling": "local" if recipe.is_local else "global",
        "metric": recipe.metric.value,
        "seed": int(seed),
        "restarts": restarts,
        "eigenvalues": [float(v) for v in es.eigenvalues],
    }
    if recipe.is_local:
        prov["K"] = min(recipe.scaling.K, n - 1)
    else:
        prov["sigma"] = recipe.scaling.sigma
    notes = tuple(str(w.message) for w in caught) + km.warnings
    return ClusteringResult(labels, k, "spectral", prov, inertia=km.inertia, warnings=notes)


PRESET_NAMES = {"old-sc": "Old SC", "base-a": "Base-a SC", "new-sc": "New SC", "hc": "HC"}


def preset_recipe(name: str, metric, base: float = 30.0, sigma: float | None = None,
                  K: int = 180) -> AffinityRecipe:
    """Recipe for ``old-sc`` (base e, global), ``base-a`` (global) or ``new-sc`` (local)."""
    metric = DistanceMetric.parse(metric)
    if name == "old-sc":
        return old_sc(metric, sigma)
    if name == "base-a":
        return base_a_sc(metric, base, sigma)
    if name == "new-sc":
        return new_sc(metric, base, K)
    raise ValueError(f"unknown spectral preset {name!r}")

