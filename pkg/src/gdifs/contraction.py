"""Comparison functions and sampled certification of weak contractions.

A comparison function is increasing with iterates tending to zero; a map f is
certified against phi by checking d(f(x), f(y)) <= phi(d(x, y)) on a
stratified pair sample (grid pairs, seeded random pairs, and near-diagonal
pairs).  Certification is evidence, not proof: the certificate records the
sample size and seed so a failure always comes with a reproducible
counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exprfn import DomainError

__all__ = [
    "Certificate",
    "ComparisonFn",
    "LinearComparison",
    "MaxComparison",
    "PowerLinearComparison",
    "RatioComparison",
    "certify_contraction",
    "comparison_health",
    "estimate_linear",
    "iterate_phi",
    "make_comparison",
    "max_comparison",
]

CERTIFY_SLACK = 1e-12


class ComparisonFn:
    """Base class; instances are callable on scalars and numpy arrays."""

    name = "?"

    def __call__(self, t):
        raise NotImplementedError

    def describe(self):
        return self.name


class LinearComparison(ComparisonFn):
    def __init__(self, c):
        if not 0.0 < c < 1.0:
            raise ValueError("linear coefficient must lie in (0,1)")
        self.c = c
        self.name = f"linear(c={c!r})"

    def __call__(self, t):
        return self.c * t


class RatioComparison(ComparisonFn):
    name = "ratio"

    def __call__(self, t):
        return t / (1.0 + t)


class PowerLinearComparison(ComparisonFn):
    """c * t^alpha; a comparison function only where it stays below t."""

    def __init__(self, c, alpha):
        if not 0.0 < c < 1.0:
            raise ValueError("coefficient must lie in (0,1)")
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.c = c
        self.alpha = alpha
        self.name = f"power_linear(c={c!r}, alpha={alpha!r})"

    def __call__(self, t):
        return self.c * t ** self.alpha


class MaxComparison(ComparisonFn):
    def __init__(self, parts):
        parts = tuple(parts)
        if not parts:
            raise ValueError("empty comparison list")
        self.parts = parts
        self.name = "max(%s)" % ", ".join(p.describe() for p in parts)

    def __call__(self, t):
        result = self.parts[0](t)
        for p in self.parts[1:]:
            result = np.maximum(result, p(t))
        return result


def max_comparison(phis):
    """Pointwise maximum of comparison functions (flattens nested maxima)."""
    flat = []
    for phi in phis:
        if isinstance(phi, MaxComparison):
            flat.extend(phi.parts)
        else:
            flat.append(phi)
    if not flat:
        raise ValueError("empty comparison list")
    if len(flat) == 1:
        return flat[0]
    return MaxComparison(flat)


def iterate_phi(phi, t, n):
    """n-fold composition phi^n(t)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    for _ in range(n):
        t = float(phi(t))
    return t


def comparison_health(phi, t_max=1.0, samples=256, target=1e-6, max_iterations=10**6):
    """Sampled sanity of a comparison function; returns a list of issues.

    Checks phi(0)=0, monotonicity and phi(t)<t on a grid of (0, t_max], and
    that iterating from t=1 drops below `target` within `max_iterations`.
    """
    issues = []
    if abs(float(phi(0.0))) > 0.0:
        issues.append(f"phi(0) = {float(phi(0.0))!r} != 0")
    ts = np.linspace(0.0, t_max, samples + 1)
    vals = np.asarray(phi(ts), dtype=float)
    if (np.diff(vals) < 0).any():
        k = int(np.argmax(np.diff(vals) < 0))
        issues.append(f"not increasing near t={ts[k]!r}")
    above = vals[1:] >= ts[1:]
    if above.any():
        k = int(np.argmax(above)) + 1
        issues.append(f"phi(t) >= t at t={ts[k]!r}")
    t, hit = 1.0, False
    for _ in range(max_iterations):
        t = float(phi(t))
        if t < target:
            hit = True
            break
    if not hit:
        issues.append(f"phi^n(1) did not reach {target!r} within {max_iterations} iterations")
    return issues


@dataclass
class Certificate:
    """Outcome of a sampled contraction check."""

    passed: bool
    worst_margin: float
    worst_ratio: float
    witness: tuple
    n_pairs: int
    rng_seed: int
    error: str | None = None

    def to_json(self):
        def point(p):
            return [float(c) for c in np.atleast_1d(np.asarray(p, dtype=float))]

        data = {
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "worst_ratio": self.worst_ratio,
            "n_pairs": self.n_pairs,
            "rng_seed": self.rng_seed,
        }
        if self.witness is not None:
            data["witness"] = [point(self.witness[0]), point(self.witness[1])]
        if self.error is not None:
            data["error"] = self.error
        return data


def _sample_pairs(dim, n_pairs, rng_seed):
    """Stratified point pairs on the domain: grid x grid, random, near-diagonal."""
    rng = np.random.default_rng(rng_seed)
    if dim == 1:
        grid = np.linspace(0.0, 1.0, 25)
        ga, gb = np.meshgrid(grid, grid, indexing="ij")
        A = [ga.ravel()]
        B = [gb.ravel()]
        n_random = max(n_pairs, 0)
        A.append(rng.random(n_random))
        B.append(rng.random(n_random))
        base = np.concatenate([grid, rng.random(25)])
        for delta in (1e-3, 1e-6):
            A.append(base)
            B.append(np.minimum(base + delta, 1.0))
        return np.concatenate(A), np.concatenate(B)
    grid = np.linspace(0.0, 1.0, 6)
    gx, gy = np.meshgrid(grid, grid, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    ia, ib = np.meshgrid(np.arange(len(pts)), np.arange(len(pts)), indexing="ij")
    A = [pts[ia.ravel()]]
    B = [pts[ib.ravel()]]
    n_random = max(n_pairs, 0)
    A.append(rng.random((n_random, 2)))
    B.append(rng.random((n_random, 2)))
    base = np.vstack([pts, rng.random((25, 2))])
    for delta in (1e-3, 1e-6):
        for shift in ((delta, 0.0), (0.0, delta), (delta, delta)):
            A.append(base)
            B.append(np.minimum(base + np.array(shift), 1.0))
    return np.vstack(A), np.vstack(B)


def certify_contraction(fmap, spec, phi, n_pairs=2000, rng_seed=0):
    """Sampled check that d(f x, f y) <= phi(d(x, y)) + slack on the domain.

    Reports the pair maximizing d(fx, fy) - phi(d(x, y)) and the worst ratio
    d(fx, fy) / phi(d(x, y)) over pairs with distinct images of phi.
    """
    A, B = _sample_pairs(spec.dim, n_pairs, rng_seed)
    try:
        FA = fmap.apply_array(A)
        FB = fmap.apply_array(B)
    except DomainError as exc:
        return Certificate(False, float("inf"), float("inf"),
                           (exc.x, exc.x), len(A), rng_seed, error=str(exc))
    D = spec.transform(spec.pair_distances(A, B))
    DF = spec.transform(spec.pair_distances(FA, FB))
    bound = np.asarray(phi(D), dtype=float)
    margins = DF - bound
    worst = int(np.argmax(margins))
    positive = bound > 0.0
    ratios = np.zeros_like(DF)
    ratios[positive] = DF[positive] / bound[positive]
    worst_margin = float(margins[worst])
    witness = (A[worst], B[worst])
    return Certificate(worst_margin <= CERTIFY_SLACK, worst_margin,
                       float(ratios.max()) if positive.any() else 0.0,
                       witness, len(A), rng_seed)


def estimate_linear(fmap, spec, n_pairs=2000, rng_seed=0, inflate=1.05, cap=0.999999):
    """Least linear comparison on samples, inflated 5% and capped below 1."""
    A, B = _sample_pairs(spec.dim, n_pairs, rng_seed)
    FA = fmap.apply_array(A)
    FB = fmap.apply_array(B)
    D = spec.transform(spec.pair_distances(A, B))
    DF = spec.transform(spec.pair_distances(FA, FB))
    mask = D > 0.0
    if not mask.any():
        raise ValueError("no separated sample pairs")
    c = float((DF[mask] / D[mask]).max()) * inflate
    return LinearComparison(min(c, cap))


def make_comparison(data):
    """Comparison function from its config form (dict or the string 'auto').

    'auto' is resolved by the caller via estimate_linear; here it is rejected
    so unresolved placeholders cannot slip through.
    """
    if data == "auto":
        raise ValueError("'auto' comparison must be resolved before construction")
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError(f"malformed comparison spec: {data!r}")
    kind = data["kind"]
    if kind == "linear":
        return LinearComparison(float(data["c"]))
    if kind == "ratio":
        return RatioComparison()
    if kind == "power_linear":
        return PowerLinearComparison(float(data["c"]), float(data["alpha"]))
    if kind == "max":
        return max_comparison([make_comparison(part) for part in data["of"]])
    raise ValueError(f"unknown comparison kind {kind!r}")
