"""FieldVec kinds and their validation rules."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fpjump.fields import FieldVec, as_values


def test_probability_accepts_normalized():
    v = FieldVec.probability(np.array([0.25, 0.5, 0.25]))
    assert v.kind == "probability"
    np.testing.assert_array_equal(v.values, [0.25, 0.5, 0.25])


def test_probability_rejects_negative():
    with pytest.raises(ValueError):
        FieldVec.probability(np.array([1.2, -0.2]))


def test_probability_rejects_unnormalized():
    with pytest.raises(ValueError):
        FieldVec.probability(np.array([0.6, 0.6]))


def test_probability_mass_tolerance_is_tight():
    FieldVec.probability(np.array([0.5, 0.5 + 9e-13]))
    with pytest.raises(ValueError):
        FieldVec.probability(np.array([0.5, 0.5 + 2e-12]))


def test_density_and_observable_kinds():
    d = FieldVec.density(np.array([0.0, 2.0, 1.0]))
    assert d.kind == "density"
    o = FieldVec.observable(np.array([-3.0, 4.0]))
    assert o.kind == "observable"


def test_ratio_and_stationary_kinds():
    r = FieldVec.ratio(np.array([1.0, 2.0]))
    assert r.kind == "ratio"
    s = FieldVec.stationary(np.array([0.5, 0.5]))
    assert s.kind == "stationary"


def test_as_values_passthrough_and_unwrap():
    raw = np.array([1.0, 2.0])
    assert as_values(raw) is raw
    fv = FieldVec.observable(raw)
    np.testing.assert_array_equal(as_values(fv), raw)


def test_values_are_read_only_containers():
    fv = FieldVec.observable(np.array([1.0, 2.0]))
    with pytest.raises((ValueError, AttributeError)):
        fv.values = np.array([9.0])  # frozen dataclass


@settings(deadline=None, max_examples=50)
@given(
    arrays(
        np.float64,
        st.integers(2, 12),
        elements=st.floats(0.0, 1.0, allow_nan=False),
    )
)
def test_probability_normalization_property(v):
    total = v.sum()
    if total <= 0.0:
        return
    p = v / total
    # renormalized vectors always pass the mass gate
    fv = FieldVec.probability(p)
    assert abs(fv.values.sum() - 1.0) <= 1e-12
