import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarlab.llr import boxplus, boxplus_minsum, g_update, metric_update, softplus

finite = st.floats(-60, 60, allow_nan=False)


def boxplus_direct(a, b):
    return math.log((math.exp(a + b) + 1) / (math.exp(a) + math.exp(b)))


def test_boxplus_value():
    assert boxplus(2.0, 3.0) == pytest.approx(1.6935, abs=1e-4)
    assert boxplus(2.0, 3.0) == pytest.approx(boxplus_direct(2.0, 3.0), abs=1e-12)


@given(finite)
def test_boxplus_zero_absorbs(b):
    assert boxplus(0.0, b) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("a", [-3.0, 0.5, 7.0])
def test_boxplus_with_certain_side(a):
    assert boxplus(a, 1e6) == pytest.approx(a, abs=1e-9)
    assert boxplus(a, -1e6) == pytest.approx(-a, abs=1e-9)


@given(finite, finite)
def test_boxplus_symmetric_and_matches_direct(a, b):
    assert boxplus(a, b) == boxplus(b, a)
    assert boxplus(a, b) == pytest.approx(boxplus_direct(a, b), abs=1e-9)


@given(st.floats(-1e300, 1e300), st.floats(-1e300, 1e300))
def test_boxplus_never_overflows(a, b):
    v = boxplus(a, b)
    assert math.isfinite(v)
    assert abs(v) <= min(abs(a), abs(b)) + 1e-12


@given(finite, finite)
def test_minsum_bounds_exact(a, b):
    ms = boxplus_minsum(a, b)
    assert abs(ms) >= abs(boxplus(a, b)) - 1e-12
    assert abs(ms) - abs(boxplus(a, b)) <= math.log(2) + 1e-12


def test_g_update():
    assert g_update(1.5, 2.0, 0) == 3.5
    assert g_update(1.5, 2.0, 1) == 0.5
    assert g_update(4.0, 0.0, 0) == 4.0
    assert g_update(4.0, 0.0, 1) == -4.0


def test_metric_update():
    assert metric_update(0.0, 0.0, 0) == pytest.approx(math.log(2))
    assert metric_update(0.0, 0.0, 1) == pytest.approx(math.log(2))
    assert metric_update(0.0, 2.0, 1) == pytest.approx(2.1269, abs=1e-4)
    assert metric_update(1.25, 800.0, 0) == 1.25
    assert metric_update(0.0, -800.0, 0) == pytest.approx(800.0)


@given(st.floats(0, 100), finite, st.integers(0, 1))
def test_metric_never_decreases(M, llr, bit):
    assert metric_update(M, llr, bit) >= M


@given(finite)
def test_softplus(x):
    assert softplus(x) == pytest.approx(math.log1p(math.exp(x)), rel=1e-12, abs=1e-300)
