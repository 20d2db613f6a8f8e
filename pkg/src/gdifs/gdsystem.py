"""The graph-directed iterated function system engine.

A system is a directed multigraph on vertices 1..q with a contraction per
edge.  The set operator sends a vector of point sets (H_1, ..., H_q) to the
vector whose i-th component is the union of f_e(H_j) over all edges e from i
to j.  Starting from a subinvariant vector of singletons (the fixed point of
the edge-selection map), the running union of iterates grows monotonically
toward the invariant compact vector; iteration stops on a Hausdorff-Pompeiu
residual or a depth cap.

All operations are deterministic: clouds are kept canonically sorted and
deduplicated, optionally snapped to a delta-grid to bound growth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hausdorff
from .contraction import Certificate, certify_contraction
from .exprfn import DomainError, PointMap, check_self_map

__all__ = [
    "Edge",
    "GraphIFS",
    "IterationResult",
    "MapEvaluationError",
    "NonConvergenceError",
    "PointCapError",
    "PointCloudVector",
    "SeedResult",
    "ValidationIssue",
    "ValidationReport",
    "apply_T",
    "iterate_attractor",
    "residual",
    "seed_fixed_point",
    "validate",
]


class NonConvergenceError(RuntimeError):
    """Seed iteration failed to settle; usually a bad contraction certificate."""


class PointCapError(RuntimeError):
    """The running union exceeded the configured point budget."""


class MapEvaluationError(RuntimeError):
    """An edge map left the domain during iteration."""

    def __init__(self, edge, cause):
        self.edge = edge
        super().__init__(f"edge {edge.label()}: {cause}")


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    fmap: PointMap
    comparison: object

    def label(self):
        return f"{self.src}->{self.dst}"


class PointCloudVector:
    """A vector of finite point sets, one per vertex, canonically sorted."""

    def __init__(self, components):
        comps = []
        dim = None
        for arr in components:
            arr = np.asarray(arr, dtype=float)
            d = 1 if arr.ndim == 1 else arr.shape[1]
            if dim is None:
                dim = d
            elif dim != d:
                raise ValueError("mixed component dimensions")
            comps.append(_canonical(arr))
        self.components = tuple(comps)
        self.dim = dim if dim is not None else 1

    @classmethod
    def from_points(cls, *pointsets):
        """Build from per-vertex iterables of scalars (1D) or pairs (2D)."""
        return cls([np.asarray(list(ps), dtype=float) for ps in pointsets])

    @property
    def q(self):
        return len(self.components)

    def counts(self):
        return tuple(len(c) for c in self.components)

    def total(self):
        return sum(self.counts())

    def __iter__(self):
        return iter(self.components)

    def __repr__(self):
        return f"PointCloudVector(q={self.q}, dim={self.dim}, counts={self.counts()})"


def _canonical(arr):
    """Sorted, exactly deduplicated; the canonical cloud representation."""
    if arr.size == 0:
        return arr.reshape(0) if arr.ndim == 1 else arr.reshape(0, arr.shape[-1])
    if arr.ndim == 1:
        out = np.unique(arr)
    else:
        out = np.unique(arr, axis=0)
    out.flags.writeable = False
    return out


def _snap(arr, delta):
    if delta > 0.0:
        return np.round(arr / delta) * delta
    return arr


class GraphIFS:
    """Directed multigraph with one contraction and comparison per edge."""

    def __init__(self, q, edges, spec, j_override=None):
        if q < 1:
            raise ValueError("need at least one vertex")
        edges = tuple(edges)
        for e in edges:
            if not (1 <= e.src <= q and 1 <= e.dst <= q):
                raise ValueError(f"edge {e.label()} outside vertex range 1..{q}")
            if e.fmap.dim != spec.dim:
                raise ValueError(f"edge {e.label()} map dimension {e.fmap.dim} != metric dimension {spec.dim}")
        self.q = q
        self.edges = edges
        self.spec = spec
        self.j_override = dict(j_override) if j_override else None

    def edges_from(self, i):
        return [e for e in self.edges if e.src == i]

    def max_comparison(self):
        from .contraction import max_comparison
        return max_comparison([e.comparison for e in self.edges])

    def __repr__(self):
        return f"GraphIFS(q={self.q}, edges={len(self.edges)}, spec={self.spec.describe()})"


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    message: str
    witness: object = None

    def to_json(self):
        data = {"kind": self.kind, "message": self.message}
        if self.witness is not None:
            data["witness"] = self.witness
        return data


@dataclass
class ValidationReport:
    issues: list = field(default_factory=list)
    certificates: list = field(default_factory=list)  # (edge, Certificate)

    @property
    def ok(self):
        return not self.issues


def validate(g, n_samples=1000, n_pairs=2000, rng_seed=0):
    """Structural and sampled checks: outgoing edges, self-maps, contractions.

    All failures are aggregated rather than stopping at the first.
    """
    report = ValidationReport()
    for i in range(1, g.q + 1):
        if not g.edges_from(i):
            report.issues.append(ValidationIssue(
                "no-outgoing-edge", f"vertex {i} has no outgoing edge", witness=i))
    for e in g.edges:
        bad = False
        for expr in e.fmap.exprs:
            sm = check_self_map(expr, 0.0, 1.0, n_samples)
            if not sm.passed:
                bad = True
                report.issues.append(ValidationIssue(
                    "not-self-map",
                    f"edge {e.label()} map {expr.source!r} leaves [0,1] at x={sm.worst_x!r}"
                    + (f" ({sm.error})" if sm.error else f" (value {sm.worst_value!r})"),
                    witness=sm.worst_x))
        if bad:
            continue
        cert = certify_contraction(e.fmap, g.spec, e.comparison, n_pairs, rng_seed)
        report.certificates.append((e, cert))
        if not cert.passed:
            report.issues.append(ValidationIssue(
                "contraction-violation",
                f"edge {e.label()} violates its comparison function "
                f"(worst margin {cert.worst_margin:.3e})",
                witness=cert.to_json().get("witness")))
    return report


@dataclass
class SeedResult:
    z: tuple
    cloud: PointCloudVector
    j: dict
    iterations: int


def _default_j(g):
    """Smallest target vertex with an edge, first edge in declaration order."""
    chosen = {}
    for i in range(1, g.q + 1):
        outgoing = g.edges_from(i)
        if not outgoing:
            raise ValueError(f"vertex {i} has no outgoing edge")
        dst = min(e.dst for e in outgoing)
        chosen[i] = next(e for e in outgoing if e.dst == dst)
    return chosen


def seed_fixed_point(g, tol=1e-12, max_iter=2_000_000):
    """Subinvariant singleton seed: the fixed point of the edge-selection map.

    One edge is chosen per vertex (a self-consistent selection J); iterating
    x_i <- f_{e_i}(x_{J(i)}) from the domain midpoint converges to the unique
    fixed point z, and ({z_1}, ..., {z_q}) is subinvariant.  Convergence is
    measured by the base-metric step size so the seed is identical under any
    transformer of the same base metric.
    """
    if g.j_override is not None:
        chosen = {}
        for i in range(1, g.q + 1):
            j = g.j_override.get(i)
            if j is None:
                raise ValueError(f"j_override missing vertex {i}")
            candidates = [e for e in g.edges_from(i) if e.dst == j]
            if not candidates:
                raise ValueError(f"j_override {i}->{j} names no edge")
            chosen[i] = candidates[0]
    else:
        chosen = _default_j(g)

    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    x = [g.spec.midpoint()] * g.q
    for iteration in range(1, max_iter + 1):
        new = [chosen[i].fmap(x[chosen[i].dst - 1]) for i in range(1, g.q + 1)]
        step = max(g.spec.base_distance(a, b) for a, b in zip(new, x))
        x = new
        if step < tol:
            break
    else:
        raise NonConvergenceError(
            f"seed iteration did not reach step < {tol!r} within {max_iter} iterations")

    for i in range(1, g.q + 1):
        gap = g.spec.base_distance(chosen[i].fmap(x[chosen[i].dst - 1]), x[i - 1])
        if gap > tol:
            raise NonConvergenceError(
                f"seed not subinvariant at vertex {i}: gap {gap!r} > tol {tol!r}")

    cloud = PointCloudVector.from_points(*([p] for p in x))
    return SeedResult(tuple(x), cloud, {i: e.dst for i, e in chosen.items()}, iteration)


def apply_T(g, H, dedup=0.0):
    """One application of the set operator, with optional grid snapping.

    Component i is the union of the edge images of the source components of
    all edges leaving i; snapping rounds each coordinate to the dedup grid.
    """
    components = []
    for i in range(1, g.q + 1):
        parts = []
        for e in g.edges_from(i):
            source = H.components[e.dst - 1]
            try:
                parts.append(e.fmap.apply_array(source))
            except DomainError as exc:
                raise MapEvaluationError(e, exc) from exc
        if not parts:
            raise ValueError(f"vertex {i} has no outgoing edge")
        merged = np.concatenate(parts)
        components.append(_canonical(_snap(merged, dedup)))
    return PointCloudVector(components)


def residual(g, H):
    """Hausdorff-Pompeiu distance between T(H) and H (no snapping)."""
    return hausdorff.hp_inf(apply_T(g, H, 0.0), H, g.spec)


@dataclass
class IterationResult:
    cloud: PointCloudVector
    residual: float
    depth: int
    history: list

    def counts(self):
        return self.cloud.counts()


def iterate_attractor(g, seed, max_depth, residual_tol=0.0, dedup=0.0,
                      point_cap=10_000_000):
    """Grow the running union of operator iterates from a subinvariant seed.

    The union U_{n+1} = U_n (union) T(U_n) increases monotonically; iteration
    stops once the residual d(T(U_n), U_n) drops to residual_tol or the depth
    cap is reached.  The reported residual is the last one measured, i.e. the
    residual of the cloud one step before the returned one.
    """
    snapped = PointCloudVector([_snap(c, dedup) for c in seed.components])
    first = apply_T(g, snapped, dedup)
    for i, (s, t) in enumerate(zip(snapped.components, first.components), start=1):
        gap = hausdorff.base_directed(s, t, g.spec.dim)
        if gap > dedup + 1e-9:
            raise ValueError(
                f"seed is not subinvariant at vertex {i}: directed gap {gap!r}")

    U = snapped
    history = []
    depth = 0
    res = float("inf")
    for depth in range(1, max_depth + 1):
        TU = apply_T(g, U, dedup)
        res = hausdorff.hp_inf(TU, U, g.spec)
        history.append(res)
        U = PointCloudVector([np.concatenate([a, b])
                              for a, b in zip(U.components, TU.components)])
        if U.total() > point_cap:
            raise PointCapError(
                f"point cap exceeded: {U.total()} > {point_cap} at depth {depth}")
        if res <= residual_tol:
            break
    return IterationResult(U, res, depth, history)
