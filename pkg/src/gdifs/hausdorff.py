"""Distances between finite point sets and set vectors.

Hausdorff-Pompeiu distance between finite sets reduces to a max of directed
max-min distances.  Nearest neighbours are found by bisection on sorted
arrays in 1D and a KD-tree under the max-coordinate metric in 2D; both return
exactly the brute-force values.  Transformers commute with min/max, so all
searching happens in the base metric and the transformer is applied once to
the result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "CoveringReport",
    "DistanceReport",
    "covering_radius",
    "d_inf",
    "hp_distance",
    "hp_inf",
]


def _directed_1d(A, B):
    """(max-min base distance, index of the farthest point of A)."""
    order = np.argsort(B, kind="stable")
    Bs = B[order]
    idx = np.searchsorted(Bs, A)
    lo = np.clip(idx - 1, 0, len(Bs) - 1)
    hi = np.clip(idx, 0, len(Bs) - 1)
    mins = np.minimum(np.abs(A - Bs[lo]), np.abs(A - Bs[hi]))
    far = int(np.argmax(mins))
    return float(mins[far]), far


def _directed_2d(A, B):
    mins, _ = cKDTree(B).query(A, p=np.inf)
    far = int(np.argmax(mins))
    return float(mins[far]), far


def _directed(A, B, dim):
    if dim == 1:
        return _directed_1d(A, B)
    return _directed_2d(A, B)


def base_directed(A, B, dim):
    """Directed max-min distance in the base metric (no transformer)."""
    value, _ = _directed(np.asarray(A, dtype=float), np.asarray(B, dtype=float), dim)
    return value


@dataclass
class DistanceReport:
    """Hausdorff-Pompeiu value with the two farthest witnesses."""

    value: float
    witness_a: object
    witness_b: object


def _as_points(A, dim):
    A = np.asarray(A, dtype=float)
    if dim == 2:
        A = A.reshape(-1, 2)
    else:
        A = A.reshape(-1)
    if A.shape[0] == 0:
        raise ValueError("point sets must be non-empty")
    return A


def hp_distance(A, B, spec):
    """Hausdorff-Pompeiu distance between finite non-empty point sets."""
    A = _as_points(A, spec.dim)
    B = _as_points(B, spec.dim)
    dab, ia = _directed(A, B, spec.dim)
    dba, ib = _directed(B, A, spec.dim)
    value = spec.transform(max(dab, dba))
    wa = A[ia] if spec.dim == 2 else float(A[ia])
    wb = B[ib] if spec.dim == 2 else float(B[ib])
    return DistanceReport(float(value), wa, wb)


def hp_inf(H, K, spec):
    """Componentwise max of Hausdorff-Pompeiu distances of two set vectors."""
    hc = H.components if hasattr(H, "components") else tuple(H)
    kc = K.components if hasattr(K, "components") else tuple(K)
    if len(hc) != len(kc):
        raise ValueError(f"vector length mismatch: {len(hc)} vs {len(kc)}")
    return max(hp_distance(a, b, spec).value for a, b in zip(hc, kc))


def d_inf(xs, ys, spec):
    """Max componentwise distance between two point vectors."""
    xs = tuple(xs)
    ys = tuple(ys)
    if len(xs) != len(ys):
        raise ValueError(f"vector length mismatch: {len(xs)} vs {len(ys)}")
    return max(spec.distance(a, b) for a, b in zip(xs, ys))


@dataclass
class CoveringReport:
    """Greedy k-center outcome: an upper bound on the optimal radius."""

    radius: float
    centers: np.ndarray


def covering_radius(points, k, spec):
    """Greedy k-center radius (farthest-point traversal).

    The first center is the lexicographically smallest point; later centers
    are the points farthest from the chosen set (first index on ties).  The
    returned radius is a 2-approximation of the optimal k-center radius.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = _as_points(points, spec.dim)
    n = pts.shape[0]
    if spec.dim == 1:
        start = int(np.argmin(pts))
        dist_to = lambda c: np.abs(pts - c)  # noqa: E731
    else:
        start = int(np.lexsort((pts[:, 1], pts[:, 0]))[0])
        dist_to = lambda c: np.abs(pts - c).max(axis=1)  # noqa: E731
    chosen = [start]
    mins = dist_to(pts[start])
    while len(chosen) < min(k, n):
        nxt = int(np.argmax(mins))
        chosen.append(nxt)
        mins = np.minimum(mins, dist_to(pts[nxt]))
    radius = float(mins.max())
    return CoveringReport(float(spec.transform(radius)), pts[np.array(chosen)])
