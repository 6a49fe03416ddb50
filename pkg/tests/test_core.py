import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from basesc.core import (AffinityRecipe, ColumnSpec, Dataset, DistanceMetric, GlobalScale, LocalScale,
                         make_rng, new_sc, old_sc, validate_dataset)
from basesc.ingest import dataset_from_csv, dataset_to_csv


def test_validate_well_formed():
    d = Dataset.from_array(np.arange(6.0).reshape(3, 2))
    assert validate_dataset(d).problems == ()


def test_validate_reports_non_finite_location():
    X = np.ones((3, 2))
    X[1, 0] = np.nan
    rep = validate_dataset(Dataset.from_array(X))
    assert not rep.ok
    assert "row 1" in rep.problems[0] and "column 0" in rep.problems[0]


def test_validate_single_row():
    rep = validate_dataset(Dataset.from_array([[1.0, 2.0]]))
    assert any("n >= 2" in p for p in rep.problems)


def test_validate_normalized_range():
    d = Dataset.from_array([[0.0, 0.2], [1.0, 0.5]], normalized=True)
    rep = validate_dataset(d)
    assert len(rep) == 1 and "span" in rep.problems[0]


def test_dataset_is_read_only():
    d = Dataset.from_array(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        d.values[0, 0] = 1.0


def test_column_spec_rules():
    with pytest.raises(ValueError):
        ColumnSpec("LS", "categorical", ())
    with pytest.raises(ValueError):
        ColumnSpec("LS", "categorical", ("Poor", "Poor"))


def test_recipe_validation_and_presets():
    with pytest.raises(ValueError):
        AffinityRecipe(1.0)
    with pytest.raises(ValueError):
        GlobalScale(0.0)
    with pytest.raises(ValueError):
        LocalScale(0)
    assert old_sc().base == math.e
    r = new_sc("sqeuclidean")
    assert r.is_local and r.base == 30.0 and r.scaling.K == 180
    assert r.metric is DistanceMetric.SQUARED_EUCLIDEAN


def test_metric_parse_aliases():
    assert DistanceMetric.parse("SqEuclidean") is DistanceMetric.SQUARED_EUCLIDEAN
    with pytest.raises(ValueError):
        DistanceMetric.parse("manhattan")


def test_rng_is_deterministic():
    assert np.array_equal(make_rng(7).random(5), make_rng(7).random(5))
    with pytest.raises(ValueError):
        make_rng(-1)


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(hnp.arrays(np.float64, hnp.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=6), elements=finite),
       st.booleans())
def test_dataset_round_trip(X, normalized):
    names = [f"c{j}" for j in range(X.shape[1])]
    cols = tuple(ColumnSpec(n, "categorical", ("lo", "hi")) if j == 0 else ColumnSpec(n)
                 for j, n in enumerate(names))
    d = Dataset(X, tuple(f"id,{i}" for i in range(X.shape[0])), cols, normalized)
    assert dataset_from_csv(dataset_to_csv(d)) == d
