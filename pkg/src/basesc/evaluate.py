"""Silhouette scoring, comparison tables, eigenvalue reports and synthetic data."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .affinity import build_affinity, default_sigma
from .clusterers import DEFAULT_LINKAGE, DEFAULT_RESTARTS, ClusteringResult, hierarchical, spectral_cluster
from .core import (DEFAULT_BASE, DEFAULT_K_NEIGHBOR, AffinityRecipe, BaseSCError, ColumnSpec, Dataset,
                   DistanceMetric, GlobalScale, SingleCluster, base_a_sc, make_rng, new_sc, old_sc)
from .metrics import DistanceMatrix, pairwise
from .spectral import laplacian, smallest_eigenpairs

ALGORITHMS = ("old", "base", "new", "hc")
SOYBEAN_COUNTS = (10, 20, 30)
RICE_COUNTS = (5, 10, 15, 20)


# ------------------------------------------------------------ silhouette


@dataclass(frozen=True, eq=False)
class SilhouetteReport:
    per_point: np.ndarray
    mean: float
    metric: DistanceMetric | None


def silhouette(dm: DistanceMatrix | np.ndarray, labels, backend: str | None = None) -> SilhouetteReport:
    """Per-point (b - a) / max(a, b); singletons score 0, as does max(a, b) = 0."""
    D = dm.values if isinstance(dm, DistanceMatrix) else np.asarray(dm, dtype=np.float64)
    metric = dm.metric if isinstance(dm, DistanceMatrix) else None
    raw = labels.labels if isinstance(labels, ClusteringResult) else np.asarray(labels)
    if raw.shape[0] != D.shape[0]:
        raise ValueError("labels length does not match the distance matrix")
    uniq, lab = np.unique(raw, return_inverse=True)
    k = uniq.size
    if k < 2:
        raise SingleCluster("silhouette needs at least two clusters")
    lab = lab.astype(np.int64)
    sums = _kernels.get("cluster_distance_sums", backend)(np.ascontiguousarray(D), lab, k)
    counts = np.bincount(lab, minlength=k).astype(np.float64)
    n = D.shape[0]
    own = sums[np.arange(n), lab]
    own_count = counts[lab]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(own_count > 1, own / (own_count - 1), 0.0)
        means = sums / counts[None, :]
    means[np.arange(n), lab] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 0, (b - a) / denom, 0.0)
    s[own_count <= 1] = 0.0
    return SilhouetteReport(s, float(s.mean()), metric)


def adjusted_rand(labels_a, labels_b) -> float:
    """Adjusted Rand index between two partitions."""
    a = np.unique(np.asarray(labels_a), return_inverse=True)[1]
    b = np.unique(np.asarray(labels_b), return_inverse=True)[1]
    if a.shape != b.shape:
        raise ValueError("label vectors differ in length")
    table = np.zeros((a.max() + 1, b.max() + 1), dtype=np.int64)
    np.add.at(table, (a, b), 1)

    def pairs(x):
        x = x.astype(np.float64)
        return (x * (x - 1) / 2).sum()

    index = pairs(table)
    rows, cols = pairs(table.sum(axis=1)), pairs(table.sum(axis=0))
    total = a.size * (a.size - 1) / 2
    expected = rows * cols / total if total else 0.0
    top = (rows + cols) / 2
    if top == expected:
        return 1.0
    return float((index - expected) / (top - expected))


# ------------------------------------------------------------ comparison


@dataclass(eq=False)
class ComparisonReport:
    """Silhouette cells plus gains over the hierarchical baseline.

    For each cluster count the best value per algorithm (over metrics) is
    compared with the best HC value: gain = (best - best_hc) / best_hc * 100.
    The average row is the mean of those gains over cluster counts.
    """

    counts: tuple[int, ...]
    metrics: tuple[DistanceMetric, ...]
    cells: dict  # (count, metric, algo) -> mean silhouette (nan on failure)
    base: float = DEFAULT_BASE
    errors: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    gains: dict = field(init=False)
    average_gain: dict = field(init=False)
    new_vs_old: float = field(init=False)

    def __post_init__(self):
        self.metrics = tuple(DistanceMetric.parse(m) for m in self.metrics)
        self.gains = {}
        for c in self.counts:
            hc = self.best(c, "hc")
            self.gains[c] = {algo: (self.best(c, algo) - hc) / hc * 100.0 if hc else math.nan
                             for algo in ("old", "base", "new")}
        self.average_gain = {algo: float(np.mean([self.gains[c][algo] for c in self.counts]))
                             for algo in ("old", "base", "new")}
        ratios = [(self.best(c, "new") / self.best(c, "old") - 1.0) * 100.0 for c in self.counts]
        self.new_vs_old = float(np.mean(ratios))

    def best(self, count: int, algo: str) -> float:
        vals = [self.cells.get((count, m, algo), math.nan) for m in self.metrics]
        vals = [v for v in vals if not math.isnan(v)]
        return max(vals) if vals else math.nan

    def headers(self) -> list[str]:
        b = f"Base-{self.base:g} SC"
        return ["Clusters", "Distance", "Old SC", b, "New SC", "HC",
                "Old SC vs HC %", f"{b} vs HC %", "New SC vs HC %"]

    def rows(self) -> list[list[str]]:
        out = []
        for c in self.counts:
            for i, m in enumerate(self.metrics):
                vals = [self.cells.get((c, m, a), math.nan) for a in ALGORITHMS]
                row = [str(c) if i == 0 else "", m.value] + [_fmt(v, 4) for v in vals]
                if i == 0:
                    row += [_fmt(self.gains[c][a], 2) for a in ("old", "base", "new")]
                else:
                    row += ["", "", ""]
                out.append(row)
        footer = ["Average percentage gain", "", "", "", "", ""]
        footer += [_fmt(self.average_gain[a], 2) for a in ("old", "base", "new")]
        out.append(footer)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, val in self.params.items():
            buf.write(f"# {key}: {val}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.headers())
        w.writerows(self.rows())
        return buf.getvalue()

    def to_text(self) -> str:
        table = [self.headers()] + self.rows()
        widths = [max(len(r[j]) for r in table[:-1]) for j in range(len(table[0]))]
        lines = [f"# {k}: {v}" for k, v in self.params.items()]
        for r in table[:-1]:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(r, widths)))
        foot = table[-1]
        lead = sum(widths[:6]) + 2 * 5
        lines.append(foot[0].ljust(lead) + "  " + "  ".join(c.rjust(w) for c, w in zip(foot[6:], widths[6:])))
        lines.append(f"New SC vs Old SC (mean per-count gain %): {_fmt(self.new_vs_old, 2)}")
        for key, msg in self.errors.items():
            lines.append(f"# failed cell {key}: {msg}")
        return "\n".join(lines) + "\n"


def _fmt(v: float, digits: int) -> str:
    return "nan" if v is None or math.isnan(v) else f"{v:.{digits}f}"


def compare(d: Dataset, cluster_counts, metrics, seed: int = 0, base: float = DEFAULT_BASE,
            K: int = DEFAULT_K_NEIGHBOR, sigma: float | None = None, linkage: str = DEFAULT_LINKAGE,
            silhouette_metric=None, restarts: int = DEFAULT_RESTARTS, threads: int = 1) -> ComparisonReport:
    """Old SC, Base-a SC, New SC and HC on every (count, metric) cell."""
    counts = tuple(int(c) for c in cluster_counts)
    metrics = tuple(DistanceMetric.parse(m) for m in metrics)
    dms = {m: pairwise(d, m) for m in set(metrics)}
    sil_dm = {}
    for m in metrics:
        sm = DistanceMetric.parse(silhouette_metric) if silhouette_metric else m
        sil_dm[m] = dms[sm] if sm in dms else pairwise(d, sm)
        dms.setdefault(sm, sil_dm[m])

    def run(cell):
        c, m, algo = cell
        dm = dms[m]
        if algo == "hc":
            res = hierarchical(dm, c, linkage)
        else:
            recipe = {"old": old_sc(m, sigma), "base": base_a_sc(m, base, sigma), "new": new_sc(m, base, K)}[algo]
            res = spectral_cluster(d, recipe, c, seed=seed, restarts=restarts, dm=dm)
        return silhouette(sil_dm[m], res).mean

    jobs = [(c, m, a) for c in counts for m in metrics for a in ALGORITHMS]

    def safe(cell):
        try:
            return cell, run(cell), None
        except (BaseSCError, ValueError) as exc:
            return cell, math.nan, f"{type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(safe, jobs))
    else:
        results = [safe(j) for j in jobs]
    cells = {cell: val for cell, val, _ in results}
    errors = {cell: err for cell, _, err in results if err}
    params = {"n": d.n, "m": d.m, "base": base, "K": K,
              "sigma": "auto (half median distance)" if sigma is None else sigma,
              "linkage": linkage, "seed": seed, "restarts": restarts,
              "silhouette_metric": silhouette_metric or "same as affinity"}
    return ComparisonReport(counts, metrics, cells, base, errors, params)


# ------------------------------------------------------------ eigen report


def default_recipes(metric=DistanceMetric.SQUARED_EUCLIDEAN, base: float = DEFAULT_BASE,
                    K: int = DEFAULT_K_NEIGHBOR, sigma: float | None = None) -> list[AffinityRecipe]:
    return [old_sc(metric, sigma), base_a_sc(metric, base, sigma), new_sc(metric, base, K)]


def _column_name(recipe: AffinityRecipe) -> str:
    if recipe.base == math.e and not recipe.is_local:
        return "lambda_base_e"
    return "lambda_base_a_local" if recipe.is_local else "lambda_base_a"


@dataclass(frozen=True, eq=False)
class EigenReport:
    columns: tuple[str, ...]
    values: np.ndarray  # k x len(columns)
    recipes: tuple[AffinityRecipe, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for name, r in zip(self.columns, self.recipes):
            buf.write(f"# {name}: {r.describe()}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("index",) + self.columns)
        for i, row in enumerate(self.values):
            w.writerow([i + 1] + [repr(float(v)) for v in row])
        return buf.getvalue()


def eigen_report(d: Dataset, recipe_list, k: int = 30) -> EigenReport:
    """The k smallest normalized-Laplacian eigenvalues for each recipe."""
    cols, names, resolved = [], [], []
    dms = {}
    for recipe in recipe_list:
        if recipe.metric not in dms:
            dms[recipe.metric] = pairwise(d, recipe.metric)
        dm = dms[recipe.metric]
        if not recipe.is_local and recipe.scaling.sigma is None:
            recipe = AffinityRecipe(recipe.base, GlobalScale(default_sigma(dm)), recipe.metric)
        kk = min(k, dm.n)
        cols.append(smallest_eigenpairs(laplacian(build_affinity(dm, recipe)), kk).eigenvalues)
        name = _column_name(recipe)
        while name in names:
            name += "_2"
        names.append(name)
        resolved.append(recipe)
    return EigenReport(tuple(names), np.column_stack(cols), tuple(resolved))


# ------------------------------------------------------------ synthetic data

CATEGORY_LABELS = ("Poor", "Moderate", "Good", "Very Good")


@dataclass(frozen=True)
class SynthSpec:
    n_points: int = 300
    n_clusters: int = 3
    dimension: int = 8
    cluster_spread: float = 1.0
    separation: float = 10.0
    categorical_columns: int = 0
    seed: int = 0
    elongation: float = 1.0  # stretch factor along one random axis per blob
    noise_fraction: float = 0.0  # share of points replaced by uniform background

    def __post_init__(self):
        if self.n_clusters < 1 or self.n_points < 1:
            raise ValueError("n_points and n_clusters must be positive")
        if self.n_clusters > self.n_points:
            raise ValueError("n_clusters must not exceed n_points")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if not (self.cluster_spread > 0 and self.separation > 0):
            raise ValueError("cluster_spread and separation must be positive")
        if self.categorical_columns < 0 or self.categorical_columns > self.dimension:
            raise ValueError("categorical_columns must lie in [0, dimension]")
        if self.elongation < 1.0:
            raise ValueError("elongation must be >= 1")
        if not 0.0 <= self.noise_fraction < 1.0:
            raise ValueError("noise_fraction must lie in [0, 1)")


def _centroids(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    k, dim, sep = spec.n_clusters, spec.dimension, spec.separation
    side = sep * max(2.0, 2.0 * k ** (1.0 / dim))
    while True:
        pts = []
        for _ in range(200 * k):
            c = rng.uniform(0.0, side, size=dim)
            if all(np.linalg.norm(c - p) >= sep for p in pts):
                pts.append(c)
                if len(pts) == k:
                    return np.array(pts)
        side *= 1.5


def synth_blobs(spec: SynthSpec) -> tuple[Dataset, np.ndarray]:
    """Gaussian blobs with well-separated centroids; raw (unnormalized) values.

    With ``categorical_columns = c`` the first c numeric columns are binned
    into four ordinal levels at their quartiles.
    """
    rng = make_rng(spec.seed)
    centers = _centroids(spec, rng)
    k, dim = spec.n_clusters, spec.dimension
    sizes = np.full(k, spec.n_points // k)
    sizes[: spec.n_points % k] += 1
    labels = np.repeat(np.arange(k), sizes)
    X = np.empty((spec.n_points, dim))
    for c in range(k):
        z = rng.normal(0.0, spec.cluster_spread, size=(sizes[c], dim))
        if spec.elongation != 1.0:
            u = rng.normal(size=dim)
            u /= np.linalg.norm(u)
            z = z + (spec.elongation - 1.0) * np.outer(z @ u, u)
        X[labels == c] = centers[c] + z
    n_noise = int(round(spec.noise_fraction * spec.n_points))
    if n_noise:
        idx = rng.choice(spec.n_points, size=n_noise, replace=False)
        lo, hi = X.min(axis=0), X.max(axis=0)
        X[idx] = rng.uniform(lo, hi, size=(n_noise, dim))
        d2 = ((X[idx, None, :] - centers[None]) ** 2).sum(axis=2)
        labels[idx] = d2.argmin(axis=1)
    perm = rng.permutation(spec.n_points)
    X, labels = X[perm], labels[perm]
    # shift into a positive, measurement-like range
    X = X - X.min(axis=0) + 1.0
    columns = []
    for j in range(dim):
        if j < spec.categorical_columns:
            edges = np.quantile(X[:, j], [0.25, 0.5, 0.75])
            X[:, j] = np.searchsorted(edges, X[:, j], side="right").astype(np.float64)
            columns.append(ColumnSpec(f"cat{j + 1}", "categorical", CATEGORY_LABELS))
        else:
            columns.append(ColumnSpec(f"trait{j + 1}"))
    ids = tuple(f"s{i + 1}" for i in range(spec.n_points))
    return Dataset(X, ids, tuple(columns), normalized=False), labels
