"""Graph Laplacians, eigenpairs, spectral embedding and spectral-graph checks.

Eigenpairs come from LAPACK's dense symmetric solver (``dsyevr`` through
``scipy.linalg.eigh``), which has no user-visible iteration cap: it either
converges or reports failure, which surfaces here as ConvergenceFailure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .affinity import AffinityMatrix, affinity_global, affinity_local, default_sigma, local_scales
from .core import DEFAULT_K_NEIGHBOR, ConvergenceFailure, IsolatedVertex, TooLarge
from .metrics import DistanceMatrix

MAX_BRUTE_FORCE_N = 20
CHEEGER_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class LaplacianMatrix:
    values: np.ndarray
    kind: str
    degree: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True, eq=False)
class SpectralEmbedding:
    coordinates: np.ndarray
    eigenvalues: np.ndarray
    zero_rows: tuple[int, ...] = ()


def _as_array(A) -> np.ndarray:
    return A.values if isinstance(A, AffinityMatrix) else np.asarray(A, dtype=np.float64)


def laplacian(A, kind: str = "normalized") -> LaplacianMatrix:
    """``D - A`` or ``I - D^-1/2 A D^-1/2`` for a symmetric nonnegative A."""
    W = _as_array(A)
    deg = W.sum(axis=1)
    if kind == "unnormalized":
        L = -W.copy()
        L[np.diag_indices_from(L)] += deg
    elif kind == "normalized":
        zero = np.flatnonzero(~(deg > 0.0))
        if zero.size:
            raise IsolatedVertex(f"vertex {zero[0]} has zero degree; normalized Laplacian undefined",
                                 index=int(zero[0]))
        s = 1.0 / np.sqrt(deg)
        L = -(W * np.outer(s, s))
        L[np.diag_indices_from(L)] += 1.0
    else:
        raise ValueError(f"unknown Laplacian kind {kind!r}")
    L.setflags(write=False)
    deg.setflags(write=False)
    return LaplacianMatrix(L, kind, deg)


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # largest-magnitude component positive; argmax picks the first on ties
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def smallest_eigenpairs(L, k: int) -> EigenSystem:
    M = L.values if isinstance(L, LaplacianMatrix) else np.asarray(L, dtype=np.float64)
    n = M.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    try:
        w, V = scipy.linalg.eigh(M, subset_by_index=[0, k - 1], driver="evr",
                                 check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"dense symmetric eigensolver failed: {exc}") from exc
    V = _fix_signs(V)
    w.setflags(write=False)
    V.setflags(write=False)
    return EigenSystem(w, V)


def all_eigenvalues(L) -> np.ndarray:
    M = L.values if isinstance(L, LaplacianMatrix) else np.asarray(L, dtype=np.float64)
    try:
        return scipy.linalg.eigh(M, eigvals_only=True, driver="evr")
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def embed(es: EigenSystem) -> SpectralEmbedding:
    X = np.asarray(es.eigenvectors, dtype=np.float64)
    norms = np.sqrt((X * X).sum(axis=1))
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        warnings.warn(f"{zero.size} embedding rows are all zero and were left unnormalized",
                      RuntimeWarning, stacklevel=2)
    safe = np.where(norms == 0.0, 1.0, norms)
    Y = X / safe[:, None]
    return SpectralEmbedding(Y, np.asarray(es.eigenvalues), tuple(int(i) for i in zero))


# ------------------------------------------------------------ verification


@dataclass(frozen=True, eq=False)
class ConductanceResult:
    phi_G: float
    argmin_subset: tuple[int, ...]
    lambda2: float


@dataclass(frozen=True)
class CheegerReport:
    lambda2: float
    phi_G: float
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


def _second_eigenvalue(W: np.ndarray) -> float:
    if W.shape[0] < 2:
        return 0.0
    return float(smallest_eigenpairs(laplacian(W), 2).eigenvalues[1])


def conductance_bruteforce(A, backend: str | None = None) -> ConductanceResult:
    """Exact graph conductance by enumerating every vertex subset.

    Among subsets with minimal conductance (relative slack 1e-12) the one with
    the smallest bitmask wins.
    """
    W = np.ascontiguousarray(_as_array(A))
    n = W.shape[0]
    if n > MAX_BRUTE_FORCE_N:
        raise TooLarge(f"brute-force conductance limited to n <= {MAX_BRUTE_FORCE_N}, got {n}")
    if n < 2:
        raise ValueError("conductance needs at least 2 vertices")
    phi = _kernels.get("subset_conductances", backend)(W)
    best = float(phi.min())
    if not math.isfinite(best):
        raise ValueError("no subset with positive volume; graph has no edges")
    mask = int(np.flatnonzero(phi <= best * (1 + 1e-12) + 1e-300)[0])
    subset = tuple(i for i in range(n) if mask >> i & 1)
    return ConductanceResult(best, subset, _second_eigenvalue(W))


def check_cheeger(A) -> CheegerReport:
    res = conductance_bruteforce(A)
    lam = res.lambda2
    lower = lam / 2.0 - CHEEGER_SLACK <= res.phi_G
    upper = res.phi_G <= math.sqrt(max(2.0 * lam, 0.0)) + CHEEGER_SLACK
    return CheegerReport(lam, res.phi_G, bool(lower), bool(upper))


@dataclass(frozen=True)
class ShrinkageReport:
    base: float
    sigma: float
    elementwise_ok: bool
    frobenius_e: float
    frobenius_a: float
    frobenius_ok: bool
    radius_e: float
    radius_a: float
    radius_ok: bool
    max_excess: float  # largest |L_a| - |L_e| over entries (<= 0 when shrinking)

    @property
    def ok(self) -> bool:
        return self.elementwise_ok and self.frobenius_ok and self.radius_ok


def check_shrinkage(dm: DistanceMatrix, sigma: float, a: float, slack: float = 1e-12) -> ShrinkageReport:
    """Compare unnormalized Laplacians built with base e and base ``a``."""
    if a < math.e:
        raise ValueError("base must be >= e")
    L_e = laplacian(affinity_global(dm, math.e, sigma), "unnormalized").values
    L_a = laplacian(affinity_global(dm, a, sigma), "unnormalized").values
    excess = float((np.abs(L_a) - np.abs(L_e)).max())
    fro_e = float(np.linalg.norm(L_e))
    fro_a = float(np.linalg.norm(L_a))
    rho_e = float(np.abs(all_eigenvalues(L_e)).max())
    rho_a = float(np.abs(all_eigenvalues(L_a)).max())
    return ShrinkageReport(
        base=a, sigma=sigma,
        elementwise_ok=excess <= slack,
        frobenius_e=fro_e, frobenius_a=fro_a,
        frobenius_ok=fro_a <= fro_e + slack,
        radius_e=rho_e, radius_a=rho_a,
        radius_ok=(rho_e <= fro_e * (1 + slack) + slack) and (rho_a <= fro_a * (1 + slack) + slack),
        max_excess=excess,
    )


@dataclass(frozen=True, eq=False)
class Conjecture1Report:
    base: float
    sigma: float
    K: int
    lambda_e: np.ndarray
    lambda_a: np.ndarray
    lambda_local: np.ndarray
    tol: float = 1e-9
    reduced: np.ndarray = field(init=False)
    local_reduced: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "reduced", self.lambda_a <= self.lambda_e + self.tol)
        object.__setattr__(self, "local_reduced", self.lambda_local <= self.lambda_a + self.tol)

    @property
    def fraction_reduced(self) -> float:
        return float(self.reduced.mean())

    @property
    def fraction_local_reduced(self) -> float:
        return float(self.local_reduced.mean())

    def table(self) -> np.ndarray:
        return np.column_stack([self.lambda_e, self.lambda_a, self.lambda_local])


def check_conjecture1(dm: DistanceMatrix, sigma: float | None, a: float, k: int,
                      K: int = DEFAULT_K_NEIGHBOR) -> Conjecture1Report:
    """Smallest normalized-Laplacian eigenvalues under the three kernels.

    The comparison is an observation; nothing here raises when the base-a
    eigenvalues fail to drop.
    """
    if sigma is None:
        sigma = default_sigma(dm)
    k = min(k, dm.n)

    def lowest(A):
        return smallest_eigenpairs(laplacian(A), k).eigenvalues

    lam_e = lowest(affinity_global(dm, math.e, sigma))
    lam_a = lowest(affinity_global(dm, a, sigma))
    scales = local_scales(dm, K)
    lam_l = lowest(affinity_local(dm, a, scales))
    return Conjecture1Report(a, sigma, scales.K, np.asarray(lam_e), np.asarray(lam_a), np.asarray(lam_l))


def random_graph(n: int, rng: np.random.Generator, density: float | None = None) -> np.ndarray:
    """Symmetric random weight matrix with no isolated vertices.

    Edge weights are uniform on (0, 1]; each edge is kept with probability
    ``density`` (drawn uniformly from [0.3, 1] when not given).
    """
    if density is None:
        density = float(rng.uniform(0.3, 1.0))
    W = 1.0 - rng.random((n, n))
    W *= rng.random((n, n)) < density
    W = np.triu(W, 1)
    W = W + W.T
    for i in np.flatnonzero(W.sum(axis=1) == 0.0):
        j = int(rng.integers(n - 1))
        j += j >= i
        W[i, j] = W[j, i] = 1.0 - rng.random()
    return W
