"""Fixed synthetic suites used for the eigenvalue and silhouette comparisons.

The trait datasets these methods were tuned on are not public, so fixed
seeded blob suites stand in for them. K for local scaling is scaled by
dataset size from the reference setting K=180 at n=2376.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import DEFAULT_K_NEIGHBOR
from .evaluate import SynthSpec

REFERENCE_N = 2376


def proportional_K(n: int, K: int = DEFAULT_K_NEIGHBOR, reference_n: int = REFERENCE_N) -> int:
    """K rescaled so that K / n matches the reference K / reference_n."""
    return max(1, min(n - 1, round(K * n / reference_n)))


# eigenvalue-ordering suite: 3 blob shapes x 5 seeds, n = 300
EIGEN_CONFIGS = (
    dict(n_clusters=3, dimension=8, cluster_spread=1.0, separation=6.0),
    dict(n_clusters=3, dimension=2, cluster_spread=1.0, separation=4.0, elongation=2.0),
    dict(n_clusters=3, dimension=5, cluster_spread=1.0, separation=5.0, noise_fraction=0.1),
)
EIGEN_SEEDS = range(5)
EIGEN_N = 300
EIGEN_K = 30


def eigen_suite():
    for cfg in EIGEN_CONFIGS:
        for seed in EIGEN_SEEDS:
            yield SynthSpec(n_points=EIGEN_N, seed=seed, **cfg)


@dataclass(frozen=True)
class DirectionalCase:
    spec: SynthSpec
    cluster_count: int


# silhouette-direction suite: noisy, partly elongated blobs clustered into
# more groups than there are blobs; seed i uses configuration i % 4
DIRECTIONAL_CONFIGS = (
    (dict(n_clusters=3, dimension=6, separation=4.0, elongation=2.5, noise_fraction=0.1), 5),
    (dict(n_clusters=3, dimension=6, separation=4.0, elongation=1.0, noise_fraction=0.1), 5),
    (dict(n_clusters=4, dimension=6, separation=4.0, elongation=2.0, noise_fraction=0.1), 6),
    (dict(n_clusters=3, dimension=8, separation=5.0, elongation=3.0, noise_fraction=0.1), 5),
)
DIRECTIONAL_SEEDS = range(20)
DIRECTIONAL_N = 300
DIRECTIONAL_METRIC = "squared_euclidean"


def directional_suite():
    for seed in DIRECTIONAL_SEEDS:
        cfg, k = DIRECTIONAL_CONFIGS[seed % len(DIRECTIONAL_CONFIGS)]
        yield DirectionalCase(SynthSpec(n_points=DIRECTIONAL_N, seed=seed, **cfg), k)
