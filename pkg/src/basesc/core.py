"""Shared domain types, errors and the seeding contract."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

DEFAULT_BASE = 30.0
DEFAULT_K_NEIGHBOR = 180
DEFAULT_EIGEN_COUNT = 30


class BaseSCError(Exception):
    """Base class for all package errors."""


class DataError(BaseSCError):
    """Problem with input data (parsing, schema, degenerate rows)."""


class NumericError(BaseSCError):
    """A numerical routine could not produce a valid result."""


class ParseError(DataError):
    pass


class EmptyFile(DataError):
    pass


class MissingColumnMapping(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class DegenerateVector(DataError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ZeroScale(DataError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class IsolatedVertex(NumericError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class ConvergenceFailure(NumericError):
    pass


class TooLarge(BaseSCError):
    pass


class KTooLarge(BaseSCError):
    pass


class InvalidLinkageMetric(BaseSCError):
    pass


class SingleCluster(BaseSCError):
    pass


class DistanceMetric(str, Enum):
    EUCLIDEAN = "euclidean"
    SQUARED_EUCLIDEAN = "squared_euclidean"
    CORRELATION = "correlation"

    @classmethod
    def parse(cls, value: "str | DistanceMetric") -> "DistanceMetric":
        if isinstance(value, DistanceMetric):
            return value
        key = value.strip().lower().replace("-", "_")
        aliases = {"sqeuclidean": "squared_euclidean", "sq_euclidean": "squared_euclidean"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown distance metric {value!r}") from None


ALL_METRICS = (DistanceMetric.EUCLIDEAN, DistanceMetric.SQUARED_EUCLIDEAN, DistanceMetric.CORRELATION)


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str = "numeric"
    category_order: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("numeric", "categorical"):
            raise ValueError(f"column {self.name!r}: kind must be numeric or categorical")
        object.__setattr__(self, "category_order", tuple(self.category_order))
        if self.kind == "categorical":
            if not self.category_order:
                raise ValueError(f"column {self.name!r}: empty category_order")
            if len(set(self.category_order)) != len(self.category_order):
                raise ValueError(f"column {self.name!r}: duplicate categories")


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """An n x m table of trait values.

    ``values`` is stored as a read-only float64 copy. ``warnings`` collects
    non-fatal notes such as constant columns found during normalization.
    """

    values: np.ndarray
    row_ids: tuple[str, ...]
    columns: tuple[ColumnSpec, ...]
    normalized: bool = False
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 2:
            raise ValueError("Dataset.values must be 2-D")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "row_ids", tuple(str(r) for r in self.row_ids))
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        if len(self.row_ids) != values.shape[0]:
            raise ValueError("row_ids length does not match number of rows")
        if len(self.columns) != values.shape[1]:
            raise ValueError("columns length does not match number of columns")

    @classmethod
    def from_array(cls, values, row_ids: Sequence[str] | None = None,
                   names: Sequence[str] | None = None, normalized: bool = False) -> "Dataset":
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        n, m = arr.shape
        if row_ids is None:
            row_ids = [str(i + 1) for i in range(n)]
        if names is None:
            names = [f"x{j + 1}" for j in range(m)]
        return cls(arr, tuple(row_ids), tuple(ColumnSpec(nm) for nm in names), normalized)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.values.shape == other.values.shape
                and bool(np.array_equal(self.values, other.values))
                and self.row_ids == other.row_ids
                and self.columns == other.columns
                and self.normalized == other.normalized)

    __hash__ = None


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self):
        return self.ok

    def __len__(self):
        return len(self.problems)


def validate_dataset(d: Dataset) -> ValidationReport:
    """List every violated Dataset invariant; never raises."""
    problems = []
    n, m = d.values.shape
    if n < 2:
        problems.append(f"n >= 2 violated (n={n})")
    if m < 1:
        problems.append(f"m >= 1 violated (m={m})")
    bad = np.argwhere(~np.isfinite(d.values))
    for i, j in bad[:20]:
        col = d.columns[j].name if j < len(d.columns) else str(j)
        problems.append(f"non-finite value at row {i} ({d.row_ids[i]}), column {j} ({col})")
    if len(bad) > 20:
        problems.append(f"... {len(bad) - 20} more non-finite values")
    if d.normalized and len(bad) == 0 and n > 0:
        for j in range(m):
            col = d.values[:, j]
            lo, hi = col.min(), col.max()
            name = d.columns[j].name
            if lo < 0.0 or hi > 1.0:
                problems.append(f"normalized column {name!r} outside [0, 1]")
            elif lo == hi:
                if lo != 0.0:
                    problems.append(f"constant normalized column {name!r} is not all zeros")
            elif lo != 0.0 or hi != 1.0:
                problems.append(f"normalized column {name!r} does not span [0, 1]")
    return ValidationReport(tuple(problems))


@dataclass(frozen=True)
class GlobalScale:
    sigma: float | None = None  # None -> data-driven default at use site

    def __post_init__(self):
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class LocalScale:
    K: int = DEFAULT_K_NEIGHBOR

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError("K must be a positive integer")


@dataclass(frozen=True)
class AffinityRecipe:
    base: float = DEFAULT_BASE
    scaling: GlobalScale | LocalScale = field(default_factory=GlobalScale)
    metric: DistanceMetric = DistanceMetric.SQUARED_EUCLIDEAN

    def __post_init__(self):
        if not self.base > 1.0 or not math.isfinite(self.base):
            raise ValueError("base must be a finite real > 1")
        object.__setattr__(self, "metric", DistanceMetric.parse(self.metric))

    @property
    def is_local(self) -> bool:
        return isinstance(self.scaling, LocalScale)

    def describe(self) -> str:
        base = "e" if self.base == math.e else f"{self.base:g}"
        if self.is_local:
            scale = f"local(K={self.scaling.K})"
        elif self.scaling.sigma is None:
            scale = "global(sigma=auto)"
        else:
            scale = f"global(sigma={self.scaling.sigma:g})"
        return f"base={base} {scale} metric={self.metric.value}"


def old_sc(metric=DistanceMetric.SQUARED_EUCLIDEAN, sigma: float | None = None) -> AffinityRecipe:
    """Natural-exponential kernel with one global bandwidth."""
    return AffinityRecipe(math.e, GlobalScale(sigma), metric)


def base_a_sc(metric=DistanceMetric.SQUARED_EUCLIDEAN, base: float = DEFAULT_BASE,
              sigma: float | None = None) -> AffinityRecipe:
    return AffinityRecipe(base, GlobalScale(sigma), metric)


def new_sc(metric=DistanceMetric.SQUARED_EUCLIDEAN, base: float = DEFAULT_BASE,
           K: int = DEFAULT_K_NEIGHBOR) -> AffinityRecipe:
    """Base-a kernel with per-point bandwidths from the K-th neighbor."""
    return AffinityRecipe(base, LocalScale(K), metric)


def make_rng(seed: int) -> np.random.Generator:
    """The only way randomized code in this package obtains randomness."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(seed))
