"""Shared fixtures and independent oracle helpers.

The oracle functions here deliberately avoid the library's own search
shortcuts: Hausdorff distances are exhaustive double loops, k-center is full
enumeration, and the Cantor function runs on exact rationals.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from gdifs.cli import demo_path
from gdifs.config import load_config


def brute_hausdorff(A, B, spec):
    """Exhaustive max-min Hausdorff-Pompeiu distance via spec.distance."""
    A = list(A)
    B = list(B)
    d_ab = max(min(spec.distance(a, b) for b in B) for a in A)
    d_ba = max(min(spec.distance(a, b) for a in A) for b in B)
    return max(d_ab, d_ba)


def brute_k_center(points, k, spec):
    """Optimal discrete k-center radius by enumerating all center subsets."""
    points = list(points)
    best = None
    for centers in combinations(points, min(k, len(points))):
        radius = max(min(spec.distance(p, c) for c in centers) for p in points)
        best = radius if best is None else min(best, radius)
    return best


def cantor_fraction(t, digits=60):
    """Cantor function on an exact rational, via its ternary expansion."""
    t = Fraction(t)
    if t <= 0:
        return Fraction(0)
    if t >= 1:
        return Fraction(1)
    value = Fraction(0)
    bit = Fraction(1, 2)
    for _ in range(digits):
        t *= 3
        d = int(t)
        t -= d
        if d == 1:
            return value + bit
        if d == 2:
            value += bit
        bit /= 2
    return value


def load_demo(name, rng_seed=0):
    return load_config(str(demo_path(name)), rng_seed=rng_seed)


@pytest.fixture(scope="session")
def exa1_config():
    return load_demo("exa1")


@pytest.fixture(scope="session")
def exa2_config():
    return load_demo("exa2")


@pytest.fixture(scope="session")
def exa3_config():
    return load_demo("exa3")


@pytest.fixture(scope="session")
def derham_affine():
    return load_demo("derham_affine").derham


@pytest.fixture(scope="session")
def derham_minkowski():
    return load_demo("derham_minkowski").derham


def assert_cloud_equal(cloud, expected_components):
    """Exact float equality of cloud components against expected lists."""
    assert len(cloud.components) == len(expected_components)
    for comp, want in zip(cloud.components, expected_components):
        want = np.asarray(want, dtype=float)
        assert comp.shape == want.shape, f"{comp} vs {want}"
        assert np.array_equal(comp, want), f"{comp} vs {want}"
