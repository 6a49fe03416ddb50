import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
from scipy.spatial.distance import cdist

from basesc.core import Dataset, DegenerateVector, DimensionMismatch, DistanceMetric
from basesc.metrics import correlation, euclidean, pairwise, pairwise_array, squared_euclidean


def test_euclidean_examples():
    assert euclidean((0, 0), (3, 4)) == 5.0
    assert euclidean((1, 2, 3), (1, 2, 3)) == 0.0
    assert euclidean((1, 2, 3), (4, 6, 3)) == 5.0


def test_squared_euclidean_examples():
    assert squared_euclidean((0, 0), (3, 4)) == 25.0
    assert squared_euclidean((2, 2), (2, 2)) == 0.0
    assert squared_euclidean((1, 1), (2, 3)) == 5.0


def test_correlation_examples():
    assert correlation((1, 2, 3), (2, 4, 6)) == pytest.approx(0.0, abs=1e-15)
    assert correlation((1, 2, 3), (3, 2, 1)) == pytest.approx(2.0, abs=1e-15)
    # centered (-1,0,1) . (-1,1,0) = 1, norms sqrt2 * sqrt2
    assert correlation((1, 2, 3), (1, 3, 2)) == pytest.approx(0.5, abs=1e-15)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        euclidean((1, 2), (1, 2, 3))


def test_correlation_constant_vector():
    with pytest.raises(DegenerateVector):
        correlation((1, 1, 1), (1, 2, 3))


def test_pairwise_degenerate_names_row():
    X = np.array([[0.0, 1.0, 2.0], [3.0, 3.0, 3.0]])
    with pytest.raises(DegenerateVector) as exc:
        pairwise(X, "correlation")
    assert exc.value.index == 1


def test_pairwise_examples():
    np.testing.assert_array_equal(pairwise(np.array([[1.0, 2.0], [1.0, 2.0]]), "euclidean").values, np.zeros((2, 2)))
    np.testing.assert_array_equal(pairwise(np.array([[0.0, 0.0], [3.0, 4.0]]), "euclidean").values,
                                  [[0, 5], [5, 0]])


@pytest.mark.parametrize("metric,scipy_name", [("euclidean", "euclidean"),
                                               ("squared_euclidean", "sqeuclidean"),
                                               ("correlation", "correlation")])
def test_pairwise_matches_cdist(rng, backend, metric, scipy_name):
    X = rng.random((25, 6))
    got = pairwise_array(X, metric, backend=backend)
    np.testing.assert_allclose(got, cdist(X, X, scipy_name), atol=1e-12)


def test_backends_agree(rng):
    X = rng.random((40, 5))
    for metric in DistanceMetric:
        a = pairwise_array(X, metric, backend="numpy")
        b = pairwise_array(X, metric, backend="numba")
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


data = hnp.arrays(np.float64, st.tuples(st.integers(3, 12), st.integers(2, 5)),
                  elements=st.floats(0, 1, allow_nan=False, width=32))


@settings(max_examples=60, deadline=None)
@given(data)
def test_symmetry_zero_diagonal_and_square_identity(X):
    E = pairwise(X, "euclidean").values
    S = pairwise(X, "squared_euclidean").values
    for M in (E, S):
        assert np.array_equal(M, M.T)
        assert (np.diag(M) == 0).all() and (M >= 0).all()
    np.testing.assert_allclose(S, E * E, rtol=1e-12, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(data)
def test_correlation_range(X):
    Z = X + np.arange(X.shape[1]) * 1e-3  # keep rows non-constant
    C = pairwise(Z, "correlation").values
    assert np.array_equal(C, C.T) and (C >= 0).all() and (C <= 2).all()


def test_triangle_inequality(rng):
    X = rng.random((30, 4))
    E = pairwise(X, "euclidean").values
    for i, j, k in itertools.combinations(range(30), 3):
        assert E[i, k] <= E[i, j] + E[j, k] + 1e-12


def test_permutation_equivariance(rng):
    X = rng.random((20, 3))
    perm = rng.permutation(20)
    for metric in DistanceMetric:
        D = pairwise(X, metric).values
        Dp = pairwise(X[perm], metric).values
        np.testing.assert_allclose(Dp, D[np.ix_(perm, perm)], rtol=1e-13, atol=1e-15)


def test_accepts_dataset():
    d = Dataset.from_array([[0.0, 0.0], [3.0, 4.0]])
    assert pairwise(d, "squared_euclidean").values[0, 1] == 25.0
