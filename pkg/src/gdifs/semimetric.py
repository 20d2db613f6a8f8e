"""Semi-metrics on [0,1] and [0,1]^2: base metrics plus pointwise transformers.

A transformer Psi turns a base metric d into the semi-metric Psi(d(x,y)).
The catalogue (power, bounded power, ratio-power, Cantor function) is closed;
each member has an analytically known generalized inverse, which is what the
triangle bound uses.  The Cantor function is evaluated through 40 ternary
digits, far below double round-off at the scales involved, and its inverse by
bisection.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "BoundedPowerTransformer",
    "CantorTransformer",
    "PowerTransformer",
    "RatioTransformer",
    "SemiMetricSpec",
    "Transformer",
    "cantor_value",
    "diam",
    "distance",
    "generalized_inverse",
    "make_transformer",
    "triangle_bound",
]


def cantor_value(t, digits=40):
    """Cantor function on [0,1], extended by 1 above; 3^-digits resolution."""
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    value = 0.0
    bit = 0.5
    for _ in range(digits):
        t *= 3.0
        d = int(t)
        t -= d
        if d == 1:
            return value + bit
        if d == 2:
            value += bit
        bit *= 0.5
    return value


class Transformer:
    """Increasing map with Psi(0)=0, Psi>0 off zero, continuous at 0."""

    name = "?"

    def __call__(self, t):
        raise NotImplementedError

    def inverse(self, u):
        """Generalized inverse inf{t >= 0 | Psi(t) > u}; inf of the empty set is +inf."""
        raise NotImplementedError

    def describe(self):
        return self.name


class PowerTransformer(Transformer):
    def __init__(self, alpha):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.alpha = alpha
        self.name = f"power({alpha!r})"

    def __call__(self, t):
        return t ** self.alpha

    def inverse(self, u):
        if u < 0:
            raise ValueError("u must be >= 0")
        return u ** (1.0 / self.alpha)


class BoundedPowerTransformer(Transformer):
    def __init__(self, alpha):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.alpha = alpha
        self.name = f"bounded_power({alpha!r})"

    def __call__(self, t):
        return np.minimum(t ** self.alpha, 1.0) if isinstance(t, np.ndarray) else min(t ** self.alpha, 1.0)

    def inverse(self, u):
        if u < 0:
            raise ValueError("u must be >= 0")
        if u >= 1.0:
            return math.inf
        return u ** (1.0 / self.alpha)


class RatioTransformer(Transformer):
    def __init__(self, alpha):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.alpha = alpha
        self.name = f"ratio({alpha!r})"

    def __call__(self, t):
        return (t / (1.0 + t)) ** self.alpha

    def inverse(self, u):
        if u < 0:
            raise ValueError("u must be >= 0")
        if u >= 1.0:
            return math.inf
        s = u ** (1.0 / self.alpha)
        return s / (1.0 - s)


class CantorTransformer(Transformer):
    name = "cantor"

    def __call__(self, t):
        if isinstance(t, np.ndarray):
            return np.array([cantor_value(v) for v in t.ravel()]).reshape(t.shape)
        return cantor_value(t)

    def inverse(self, u, width=1e-12):
        if u < 0:
            raise ValueError("u must be >= 0")
        if u == 0.0:
            return 0.0  # the function is positive on all of (0, inf)
        if u >= 1.0:
            return math.inf
        lo, hi = 0.0, 1.0
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            if cantor_value(mid) > u:
                hi = mid
            else:
                lo = mid
        return hi


_TRANSFORMERS = {
    "power": lambda p: PowerTransformer(p["alpha"]),
    "bounded_power": lambda p: BoundedPowerTransformer(p["alpha"]),
    "ratio": lambda p: RatioTransformer(p["alpha"]),
    "cantor": lambda p: CantorTransformer(),
}


def make_transformer(kind, **params):
    if kind not in _TRANSFORMERS:
        raise ValueError(f"unknown transformer kind {kind!r}; known: {sorted(_TRANSFORMERS)}")
    return _TRANSFORMERS[kind](params)


class SemiMetricSpec:
    """Base metric (euclid1d on [0,1] or euclid2d max-coordinate on [0,1]^2)
    with an optional transformer applied pointwise."""

    BASES = ("euclid1d", "euclid2d")

    def __init__(self, base="euclid1d", transformer=None):
        if base not in self.BASES:
            raise ValueError(f"unknown base {base!r}; known: {self.BASES}")
        self.base = base
        self.transformer = transformer
        self.dim = 1 if base == "euclid1d" else 2

    def __repr__(self):
        return f"SemiMetricSpec({self.base!r}, {getattr(self.transformer, 'name', None)!r})"

    def describe(self):
        if self.transformer is None:
            return self.base
        return f"{self.base}+{self.transformer.describe()}"

    def midpoint(self):
        return 0.5 if self.dim == 1 else (0.5, 0.5)

    def contains(self, point, slack=1e-12):
        if self.dim == 1:
            return -slack <= point <= 1.0 + slack
        return all(-slack <= c <= 1.0 + slack for c in point)

    def base_distance(self, x, y):
        if self.dim == 1:
            return abs(float(x) - float(y))
        return max(abs(float(x[0]) - float(y[0])), abs(float(x[1]) - float(y[1])))

    def transform(self, value):
        if self.transformer is None:
            return value
        return self.transformer(value)

    def distance(self, x, y):
        return self.transform(self.base_distance(x, y))

    def pair_distances(self, A, B):
        """Base distances between A[i] and B[i] for aligned point arrays."""
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        if self.dim == 1:
            return np.abs(A - B)
        return np.abs(A - B).max(axis=1)


def distance(spec, x, y):
    """Transformed distance between two points of the base domain."""
    return spec.distance(x, y)


def generalized_inverse(transformer, u):
    """inf{t >= 0 | Psi(t) > u}, +inf when that set is empty."""
    return transformer.inverse(u)


def triangle_bound(spec, u, v):
    """Upper bound for the basic triangle function at (u, v).

    Exact (u+v) for untransformed bases; for transformed metrics this is the
    closed-form bound Psi(Psi^(-1)(u) + Psi^(-1)(v)), an upper bound rather
    than the exact sup.
    """
    if u < 0 or v < 0:
        raise ValueError("u, v must be >= 0")
    if spec.transformer is None:
        return u + v
    iu = spec.transformer.inverse(u)
    iv = spec.transformer.inverse(v)
    if math.isinf(iu) or math.isinf(iv):
        return math.inf
    return spec.transformer(iu + iv)


def diam(points, spec):
    """Max pairwise distance of a finite non-empty point set.

    Both base metrics are coordinate-wise, so the max pairwise base distance
    is the largest coordinate range.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("diam of an empty set")
    if spec.dim == 1:
        base = float(pts.max() - pts.min())
    else:
        pts = pts.reshape(-1, 2)
        base = float((pts.max(axis=0) - pts.min(axis=0)).max())
    return spec.transform(base)
