import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import cantor_fraction
from gdifs.semimetric import (BoundedPowerTransformer, CantorTransformer,
                              PowerTransformer, RatioTransformer,
                              SemiMetricSpec, cantor_value, diam, distance,
                              generalized_inverse, make_transformer,
                              triangle_bound)

ALL_TRANSFORMERS = [
    PowerTransformer(0.5),
    PowerTransformer(2.0),
    BoundedPowerTransformer(1.0),
    BoundedPowerTransformer(0.7),
    RatioTransformer(1.0),
    RatioTransformer(4.0),
    CantorTransformer(),
]

ALL_SPECS = [SemiMetricSpec("euclid1d"), SemiMetricSpec("euclid2d")] + [
    SemiMetricSpec("euclid1d", t) for t in ALL_TRANSFORMERS
]


def test_distance_examples():
    spec = SemiMetricSpec("euclid1d", PowerTransformer(0.5))
    assert distance(spec, 0.0, 0.25) == 0.5
    for t in ALL_TRANSFORMERS:
        assert SemiMetricSpec("euclid1d", t).distance(0.37, 0.37) == 0.0
    # (1/(1+1))^4
    spec = SemiMetricSpec("euclid1d", RatioTransformer(4.0))
    assert distance(spec, 0.0, 1.0) == 0.0625


def test_euclid2d_distance():
    spec = SemiMetricSpec("euclid2d")
    assert spec.distance((0.0, 0.0), (0.25, 0.5)) == 0.5
    assert spec.distance((0.1, 0.9), (0.1, 0.9)) == 0.0


def test_symmetry_bit_exact():
    rng = np.random.default_rng(7)
    for spec in ALL_SPECS:
        for _ in range(50):
            if spec.dim == 1:
                x, y = rng.random(), rng.random()
            else:
                x, y = tuple(rng.random(2)), tuple(rng.random(2))
            assert spec.distance(x, y) == spec.distance(y, x)


def test_positivity_on_samples():
    for spec in ALL_SPECS:
        if spec.dim != 1:
            continue
        for x, y in [(0.0, 1e-9), (0.2, 0.4), (0.0, 1.0), (0.999, 1.0)]:
            assert spec.distance(x, y) > 0.0


def test_transformer_invariants():
    grid = np.linspace(0.0, 2.0, 401)
    for t in ALL_TRANSFORMERS:
        assert t(0.0) == 0.0
        values = np.array([t(v) for v in grid])
        assert (np.diff(values) >= 0.0).all(), t.name
        assert (values[1:] > 0.0).all(), t.name
        # continuity at 0 on a dyadic grid
        small = np.array([t(2.0 ** -k) for k in range(1, 45)])
        assert small[-1] < 1e-6
        assert (np.diff(small) <= 0.0).all()


def test_generalized_inverse_examples():
    assert generalized_inverse(PowerTransformer(2.0), 4.0) == 2.0
    assert generalized_inverse(BoundedPowerTransformer(1.0), 1.0) == math.inf
    assert generalized_inverse(RatioTransformer(1.0), 1.0) == math.inf
    # Cantor function equals 1/2 exactly on [1/3, 2/3]; oracle below brackets
    # the sup of that plateau on a 3^-8 grid.
    step = Fraction(1, 3**8)
    plateau_sup = max(k * step for k in range(3**8 + 1)
                      if cantor_fraction(k * step) <= Fraction(1, 2))
    assert Fraction(2, 3) <= plateau_sup <= Fraction(2, 3) + step
    got = generalized_inverse(CantorTransformer(), 0.5)
    assert abs(got - 2.0 / 3.0) <= 1e-10


def test_generalized_inverse_round_trip():
    us = np.linspace(0.0, 1.5, 64)
    for t in ALL_TRANSFORMERS:
        for u in us:
            inv = t.inverse(t(float(u)))
            assert inv >= u - 1e-9, (t.name, u)


def test_generalized_inverse_to_zero():
    # ratio(4) decays like u^(1/4), so 2^-39 only reaches ~1e-3
    for t in ALL_TRANSFORMERS:
        values = [t.inverse(2.0 ** -k) for k in range(1, 40)]
        assert all(np.diff(values) <= 1e-11)
        assert values[-1] < 2e-3, t.name


def test_triangle_bound_examples():
    assert triangle_bound(SemiMetricSpec("euclid1d"), 0.2, 0.3) == 0.5
    spec = SemiMetricSpec("euclid1d", PowerTransformer(0.5))
    assert triangle_bound(spec, 0.5, 0.5) == pytest.approx(math.sqrt(0.5), abs=1e-15)
    for spec in ALL_SPECS:
        assert triangle_bound(spec, 0.0, 0.0) == 0.0


def test_triangle_bound_infinite():
    spec = SemiMetricSpec("euclid1d", BoundedPowerTransformer(1.0))
    assert triangle_bound(spec, 1.0, 0.1) == math.inf


def test_triangle_bound_regular_at_origin():
    for spec in ALL_SPECS:
        values = [triangle_bound(spec, 2.0 ** -k, 2.0 ** -k) for k in range(2, 40)]
        assert values[-1] < 1e-3, spec.describe()
        assert all(v >= 0 for v in values)


def test_triangle_bound_rejects_negative():
    with pytest.raises(ValueError):
        triangle_bound(SemiMetricSpec("euclid1d"), -0.1, 0.0)


def test_diam_examples():
    spec1 = SemiMetricSpec("euclid1d")
    assert diam([0.5], spec1) == 0.0
    assert diam([0.0, 1.0], spec1) == 1.0
    spec = SemiMetricSpec("euclid1d", PowerTransformer(0.5))
    assert diam([0.0, 0.5, 1.0], spec) == 1.0
    spec2 = SemiMetricSpec("euclid2d")
    assert diam([(0.0, 0.0), (0.3, 0.8), (1.0, 0.2)], spec2) == 1.0
    with pytest.raises(ValueError):
        diam([], spec1)


def test_diam_matches_bruteforce():
    rng = np.random.default_rng(11)
    pts = rng.random(20)
    spec = SemiMetricSpec("euclid1d", RatioTransformer(2.0))
    brute = max(spec.distance(a, b) for a in pts for b in pts)
    assert diam(pts, spec) == brute


def test_cantor_against_fraction_oracle():
    # float(k/81) carries ~1e-17 representation error, which the Cantor
    # function amplifies by its Hoelder modulus to ~1e-11 near digit edges
    for k in range(0, 82):
        t = Fraction(k, 81)
        assert cantor_value(float(t)) == pytest.approx(float(cantor_fraction(t)), abs=1e-10)
    # 1/4 is exactly representable; only the 40-digit truncation remains
    assert cantor_value(0.25) == pytest.approx(1.0 / 3.0, abs=1e-11)


def test_make_transformer():
    assert make_transformer("power", alpha=0.5).name == "power(0.5)"
    assert make_transformer("cantor").name == "cantor"
    with pytest.raises(ValueError):
        make_transformer("nope")
    with pytest.raises(ValueError):
        make_transformer("power", alpha=-1.0)


def test_bad_base():
    with pytest.raises(ValueError):
        SemiMetricSpec("euclid3d")
