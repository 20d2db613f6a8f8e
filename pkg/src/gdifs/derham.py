"""Two-vertex de Rham-type functional equations solved by interval addressing.

A compatible family is four strictly increasing contractions h[i][j] on [0,1]
whose endpoint values chain 0 -> breakpoint -> 1 within each row.  Composing
maps along a digit string (i_1, ..., i_n) nests intervals; the digit string
of a point x under the f family, pushed through the g family, pins down the
solution pair (phi_1, phi_2) of

    g[i][j] o phi_j = phi_i o f[i][j]      (i, j in {1, 2})

to an interval whose length drops below any tolerance.  The same data feeds
a two-vertex product system on [0,1]^2 whose attractor components are the
graphs of phi_1 and phi_2, which gives an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contraction import certify_contraction, max_comparison
from .exprfn import DomainError, PointMap
from .gdsystem import Edge, GraphIFS, PointCloudVector, iterate_attractor
from .semimetric import SemiMetricSpec

__all__ = [
    "Address",
    "AddressDepthError",
    "CompatibleFamily",
    "CompatibilityReport",
    "DeRhamSystem",
    "FunctionalEquationReport",
    "PhiValue",
    "address",
    "check_compatibility",
    "eval_phi",
    "graph_attractor",
    "interval",
    "max_interval_length",
    "product_system",
    "verify_functional_equation",
]

ANCHOR_TOL = 1e-12


class AddressDepthError(RuntimeError):
    """Interval splitting stopped shrinking; the family is near-degenerate."""


class CompatibleFamily:
    """Maps h[i][j] (i, j in {1,2}) with one comparison function each."""

    def __init__(self, maps, comparisons):
        self._maps = {}
        self._cmp = {}
        for i in (1, 2):
            for j in (1, 2):
                expr = maps[(i, j)]
                self._maps[(i, j)] = expr
                self._cmp[(i, j)] = comparisons[(i, j)] if isinstance(comparisons, dict) else comparisons
        self._fns = {k: e.fn for k, e in self._maps.items()}

    def map(self, i, j):
        return self._maps[(i, j)]

    def fn(self, i, j):
        return self._fns[(i, j)]

    def comparison(self, i, j):
        return self._cmp[(i, j)]

    def comparisons(self):
        return [self._cmp[(i, j)] for i in (1, 2) for j in (1, 2)]

    def sources(self):
        return {f"h{i}{j}": self._maps[(i, j)].source for i in (1, 2) for j in (1, 2)}

    def __repr__(self):
        return "CompatibleFamily(%s)" % self.sources()


@dataclass
class CompatibilityReport:
    violations: list

    @property
    def ok(self):
        return not self.violations


def check_compatibility(family, grid=1000, tol=ANCHOR_TOL):
    """Anchor conditions and strict monotonicity of every family member.

    Per row i: h[i][1](0) = 0, h[i][2](1) = 1, h[i][1](1) = h[i][2](0), and
    the shared breakpoint lies strictly inside (0,1).  Monotonicity is
    sampled on an equispaced grid.  Evaluation domain errors are reported
    as violations rather than raised.
    """
    violations = []
    for i in (1, 2):
        try:
            lo = family.map(i, 1).eval(0.0)
            b1 = family.map(i, 1).eval(1.0)
            b2 = family.map(i, 2).eval(0.0)
            hi = family.map(i, 2).eval(1.0)
        except DomainError as exc:
            violations.append(f"row {i} anchor evaluation failed: {exc}")
            continue
        if abs(lo) > tol:
            violations.append(f"h{i}1(0) = {lo!r} != 0")
        if abs(b1 - b2) > tol:
            violations.append(f"h{i}1(1) = {b1!r} != h{i}2(0) = {b2!r}")
        if abs(hi - 1.0) > tol:
            violations.append(f"h{i}2(1) = {hi!r} != 1")
        if not b1 > 0.0:
            violations.append(f"breakpoint h{i}1(1) = {b1!r} not > 0")
        if not b2 < 1.0:
            violations.append(f"breakpoint h{i}2(0) = {b2!r} not < 1")
    xs = np.linspace(0.0, 1.0, grid + 1)
    for i in (1, 2):
        for j in (1, 2):
            try:
                values = family.map(i, j).eval_array(xs)
            except DomainError as exc:
                violations.append(f"h{i}{j} evaluation failed: {exc}")
                continue
            diffs = np.diff(values)
            if (diffs <= 0).any():
                k = int(np.argmax(diffs <= 0))
                violations.append(
                    f"h{i}{j} not strictly increasing between x={xs[k]!r} and x={xs[k + 1]!r}")
    return CompatibilityReport(violations)


class DeRhamSystem:
    """Two compatible families with the common comparison function."""

    def __init__(self, f, g):
        self.f = f
        self.g = g
        self.phi = max_comparison(f.comparisons() + g.comparisons())

    def validate(self, n_pairs=2000, rng_seed=0):
        """Compatibility of both families plus per-map contraction certificates."""
        issues = []
        for name, family in (("f", self.f), ("g", self.g)):
            report = check_compatibility(family)
            issues.extend(f"{name}: {v}" for v in report.violations)
        certificates = {}
        spec = SemiMetricSpec("euclid1d")
        for name, family in (("f", self.f), ("g", self.g)):
            for i in (1, 2):
                for j in (1, 2):
                    cert = certify_contraction(PointMap(family.map(i, j)), spec,
                                               family.comparison(i, j), n_pairs, rng_seed)
                    certificates[f"{name}{i}{j}"] = cert
                    if not cert.passed:
                        issues.append(f"{name}{i}{j}: contraction certificate failed "
                                      f"(worst margin {cert.worst_margin:.3e})")
        return issues, certificates


@dataclass(frozen=True)
class Address:
    """Digit string locating a point in the nested family intervals."""

    vertex: int
    digits: tuple


def _compose(chain, t):
    for fn in reversed(chain):
        t = fn(t)
    return t


class _AddressWalker:
    """Digit-by-digit descent of x through the nested family intervals.

    When x hits a breakpoint exactly it becomes an endpoint of the chosen
    child, which forces every later digit (2s after going left, 1s after
    going right); comparing against further breakpoints would be meaningless
    once they collapse onto x in floating point.
    """

    def __init__(self, family, i, x, tie_left=True):
        self.family = family
        self.x = x
        self.tie_left = tie_left
        self.chain = []
        self.vertex = i
        self.locked = None

    def step(self):
        if self.locked is None:
            b = _compose(self.chain, self.family.fn(self.vertex, 1)(1.0))
            if self.x == b:
                digit = 1 if self.tie_left else 2
                self.locked = 2 if self.tie_left else 1
            else:
                digit = 1 if self.x < b else 2
        else:
            digit = self.locked
        self.chain.append(self.family.fn(self.vertex, digit))
        self.vertex = digit
        return digit

    def interval(self):
        return _compose(self.chain, 0.0), _compose(self.chain, 1.0)


def address(family, i, x, n, tie_left=True):
    """First n digits of x at vertex i.

    At each level the breakpoint is the composite image of the left branch
    endpoint; x strictly below it selects digit 1, strictly above selects 2,
    and ties go left (digit 1) unless tie_left=False flips them.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0,1]")
    walker = _AddressWalker(family, i, x, tie_left)
    return Address(i, tuple(walker.step() for _ in range(n)))


def interval(family, i, digits):
    """Endpoints of the nested interval addressed by the digit string."""
    chain = []
    vertex = i
    for digit in digits:
        chain.append(family.fn(vertex, digit))
        vertex = digit
    return _compose(chain, 0.0), _compose(chain, 1.0)


def max_interval_length(family, i, n, phi=None):
    """Largest depth-n interval length; exact up to n=16, bounded beyond.

    Beyond 16 digits the 2^n enumeration is replaced by the comparison-
    function bound phi^n(1), which dominates every interval length.
    """
    if n <= 16:
        worst = 0.0
        stack = [(i, [], 0)]
        while stack:
            vertex, chain, depth = stack.pop()
            if depth == n:
                worst = max(worst, _compose(chain, 1.0) - _compose(chain, 0.0))
                continue
            for digit in (1, 2):
                stack.append((digit, chain + [family.fn(vertex, digit)], depth + 1))
        return worst
    if phi is None:
        phi = max_comparison(family.comparisons())
    t = 1.0
    for _ in range(n):
        t = float(phi(t))
    return t


@dataclass
class PhiValue:
    value: float
    err_bound: float
    depth: int


def eval_phi(sys, i, x, tol=1e-10, tie_left=True, max_depth=50_000):
    """Solution value phi_i(x) with a two-sided error bound.

    Digits of x under the f family are extended until the corresponding
    g-interval is no longer than tol; the returned value is its midpoint and
    the bound half its length.  Endpoints are exact by construction.
    """
    if x <= 0.0:
        return PhiValue(0.0, 0.0, 0)
    if x >= 1.0:
        return PhiValue(1.0, 0.0, 0)
    walker = _AddressWalker(sys.f, i, x, tie_left)
    g_chain = []
    vertex = i
    for depth in range(1, max_depth + 1):
        digit = walker.step()
        g_chain.append(sys.g.fn(vertex, digit))
        vertex = digit
        if walker.locked is not None:
            # x is an endpoint of the current interval, so the remaining
            # digit tail is constant and the anchor conditions pin the value
            # to a finite composite: no truncation error.
            endpoint = 1.0 if walker.locked == 2 else 0.0
            return PhiValue(_compose(g_chain, endpoint), 0.0, depth)
        g_lo = _compose(g_chain, 0.0)
        g_hi = _compose(g_chain, 1.0)
        if g_hi - g_lo <= tol:
            return PhiValue(0.5 * (g_lo + g_hi), 0.5 * (g_hi - g_lo), depth)
        if depth > 64:
            f_lo, f_hi = walker.interval()
            if f_hi - f_lo > 1e-15:
                raise AddressDepthError(
                    f"addressing interval still {f_hi - f_lo!r} wide after {depth} digits")
    raise AddressDepthError(f"value interval did not reach tol={tol!r} within {max_depth} digits")


@dataclass
class FunctionalEquationReport:
    max_residual: float
    worst: tuple  # (i, j, x)
    bound: float
    grid: int
    tol: float


def verify_functional_equation(sys, grid=1001, tol=1e-10):
    """Two-sided residuals of g[i][j] o phi_j - phi_i o f[i][j] on a grid.

    Both sides are evaluated independently through eval_phi; the reported
    bound combines the evaluation tolerance with the modulus of g.
    """
    xs = np.linspace(0.0, 1.0, grid)
    cache = {j: [eval_phi(sys, j, float(x), tol).value for x in xs] for j in (1, 2)}
    worst = (1, 1, 0.0)
    max_residual = 0.0
    for i in (1, 2):
        for j in (1, 2):
            gfn = sys.g.fn(i, j)
            ffn = sys.f.fn(i, j)
            for k, x in enumerate(xs):
                lhs = gfn(cache[j][k])
                rhs = eval_phi(sys, i, ffn(float(x)), tol).value
                r = abs(lhs - rhs)
                if r > max_residual:
                    max_residual = r
                    worst = (i, j, float(x))
    bound = float(sys.phi(0.5 * tol)) + 0.5 * tol + 1e-13
    return FunctionalEquationReport(max_residual, worst, bound, grid, tol)


def product_system(sys):
    """The two-vertex system on [0,1]^2 pairing f on x with g on y."""
    spec = SemiMetricSpec("euclid2d")
    edges = []
    for i in (1, 2):
        for j in (1, 2):
            edges.append(Edge(i, j, PointMap(sys.f.map(i, j), sys.g.map(i, j)), sys.phi))
    return GraphIFS(2, edges, spec)


def graph_attractor(sys, depth, dedup=0.0):
    """Attractor cloud of the product system from the corner seed.

    Component i approximates the graph of phi_i.
    """
    g = product_system(sys)
    seed = PointCloudVector.from_points([(0.0, 0.0)], [(1.0, 1.0)])
    return iterate_attractor(g, seed, max_depth=depth, dedup=dedup).cloud
