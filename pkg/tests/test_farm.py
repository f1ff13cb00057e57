import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from farmtwin.farm import (
    INSPECTED,
    SURVEYED,
    DomainError,
    FuzzyParams,
    FuzzyParamsError,
    Thresholds,
    Tile,
    confidence,
    mean_ndvi,
    mu_bad,
    mu_good,
    needs_inspection,
    validate_fuzzy_params,
)

P = FuzzyParams(-0.2, 0.4, -0.6, 0.2)


def polyline(points, x):
    """Independent piecewise-linear evaluation through (x, y) breakpoints."""
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x0 <= x <= x1:
            if x1 == x0:
                return y1
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise ValueError(x)


def good_ref(x, p):
    return polyline([(-1.0, 0.0), (p.a1, 0.0), (p.b1, 1.0), (1.0, 1.0)], x)


def bad_ref(x, p):
    return polyline([(-1.0, 1.0), (p.a2, 1.0), (p.b2, 0.0), (1.0, 0.0)], x)


def test_validate_ok():
    assert validate_fuzzy_params(P) is P


@pytest.mark.parametrize(
    "params, msg",
    [
        (FuzzyParams(0.4, 0.4, -0.6, 0.2), "a1 < b1 required"),
        (FuzzyParams(-1.5, 0.4, -0.6, 0.2), "a1 out of [-1,1]"),
        (FuzzyParams(-0.2, 0.4, 0.3, 0.2), "a2 < b2 required"),
        (FuzzyParams(-0.2, 1.2, -0.6, 0.2), "b1 out of [-1,1]"),
    ],
)
def test_validate_rejects(params, msg):
    with pytest.raises(FuzzyParamsError, match=msg.replace("[", r"\[").replace("]", r"\]")):
        validate_fuzzy_params(params)


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (-0.2, 0.0), (0.1, 0.5)])
def test_mu_good_examples(x, expected):
    assert mu_good(x, P) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("x, expected", [(-1.0, 1.0), (0.2, 0.0), (-0.2, 0.5)])
def test_mu_bad_examples(x, expected):
    assert mu_bad(x, P) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("fn", [mu_good, mu_bad])
@pytest.mark.parametrize("x", [-1.0001, 1.5, math.nan])
def test_membership_domain(fn, x):
    with pytest.raises(DomainError):
        fn(x, P)


@pytest.mark.parametrize(
    "pixels, expected", [([0.2, 0.4, 0.6], 0.4), ([0.7], 0.7), ([-1, 1, -1, 1], 0.0)]
)
def test_mean_ndvi(pixels, expected):
    assert mean_ndvi(pixels) == pytest.approx(expected, abs=1e-12)


def test_mean_ndvi_empty():
    with pytest.raises(ValueError):
        mean_ndvi([])


def test_confidence_examples():
    assert confidence(1.0, P) == 1.0
    # oracle: independent polyline evaluation of both ramps
    expected = abs(good_ref(0.1, P) - bad_ref(0.1, P))
    assert expected == pytest.approx(0.375, abs=1e-12)
    assert confidence(0.1, P) == pytest.approx(expected, abs=1e-12)


def test_confidence_zero_where_memberships_cross():
    # Good ramp (x+0.2)/0.6 meets Bad ramp (0.2-x)/0.8 at x = -0.04/1.4
    x = -0.04 / 1.4
    assert confidence(x, P) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("alpha, expected", [(0.3, True), (0.5, False), (1.0, False)])
def test_needs_inspection(alpha, expected):
    assert needs_inspection(alpha, Thresholds(0.5, 20)) is expected


params = st.tuples(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
).filter(lambda t: t[0] < t[1] and t[2] < t[3]).map(lambda t: FuzzyParams(*t))
ndvi = st.floats(-1, 1)


@given(params, ndvi)
def test_memberships_match_polyline_oracle(p, x):
    assert mu_good(x, p) == pytest.approx(good_ref(x, p), abs=1e-9)
    assert mu_bad(x, p) == pytest.approx(bad_ref(x, p), abs=1e-9)


@given(params, ndvi, ndvi)
def test_monotone(p, x, y):
    lo, hi = min(x, y), max(x, y)
    assert mu_good(lo, p) <= mu_good(hi, p)
    assert mu_bad(lo, p) >= mu_bad(hi, p)


@given(params, ndvi)
def test_ranges(p, x):
    assert 0.0 <= mu_good(x, p) <= 1.0
    assert 0.0 <= mu_bad(x, p) <= 1.0
    assert 0.0 <= confidence(x, p) <= 1.0


@given(params)
def test_boundaries_exact(p):
    assert mu_good(p.a1, p) == 0.0
    assert mu_good(p.b1, p) == 1.0
    assert mu_bad(p.a2, p) == 1.0
    assert mu_bad(p.b2, p) == 0.0


@given(ndvi, st.integers(1, 50))
def test_mean_of_copies(x, k):
    assert mean_ndvi([x] * k) == pytest.approx(x, abs=1e-12)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_needs_inspection_monotone(alpha, lower, t):
    th = Thresholds(t, 20)
    if needs_inspection(alpha, th):
        assert needs_inspection(alpha * lower, th)


def test_tile_transitions():
    t = Tile(0, 0, 0, [0.5, 0.5])
    assert t.center == (0.5, 0.5)
    t.move_to(SURVEYED)
    with pytest.raises(ValueError):
        t.move_to(INSPECTED)


def test_tile_rejects_bad_pixels():
    with pytest.raises(ValueError):
        Tile(0, 0, 0, [])
    with pytest.raises(DomainError):
        Tile(0, 0, 0, [1.2])


def test_thresholds_ranges():
    with pytest.raises(ValueError):
        Thresholds(1.5, 20)
    with pytest.raises(ValueError):
        Thresholds(0.5, 120)
