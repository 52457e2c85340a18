"""Derived estimators on top of the regressor: level-set recovery with
Hausdorff evaluation, global-maxima estimation, and the empirical
distinct-neighbor-set counter."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .neighbors import PointSet, as_point_set, build_index, knn_radii, _sq_dists
from .regression import Dataset, Regressor, ScalarField, predict_batch


@dataclass(frozen=True)
class LevelSetEstimate:
    level: float
    epsilon: float
    member_indices: np.ndarray
    member_points: np.ndarray


def estimate_level_set(reg: Regressor, level: float,
                       epsilon: float) -> LevelSetEstimate:
    """Sample points whose prediction clears level - epsilon (ties kept)."""
    epsilon = float(epsilon)
    if epsilon < 0.0:
        raise ValueError("epsilon must be nonnegative")
    preds = predict_batch(reg, reg.data.x.points)
    threshold = float(level) - epsilon
    members = np.flatnonzero(preds >= threshold)
    return LevelSetEstimate(level=float(level), epsilon=epsilon,
                            member_indices=members,
                            member_points=reg.data.x.points[members])


@dataclass(frozen=True)
class PointCloud:
    """Finite point cloud with provenance; may be empty (then unusable for
    Hausdorff evaluation)."""

    dim: int
    points: np.ndarray
    provenance: str = "samples"
    spacing: Optional[float] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, self.dim)
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return self.points.shape[0]


def cloud_from_level_set(est: LevelSetEstimate, dim: int) -> PointCloud:
    return PointCloud(dim=dim, points=est.member_points, provenance="samples")


def true_level_set_grid(fld: ScalarField, level: float, grid,
                        spacing: Optional[float] = None) -> PointCloud:
    """Grid discretization of the true super-level region.  An empty result
    (level above the grid maximum) is returned as an empty cloud, which the
    Hausdorff metric refuses to evaluate."""
    ps = as_point_set(grid)
    vals = fld.evaluate(ps.points)
    keep = vals >= float(level)
    return PointCloud(dim=ps.dim, points=ps.points[keep],
                      provenance="grid-discretized-truth", spacing=spacing)


def _check_clouds(a: PointCloud, b: PointCloud):
    if a.size == 0 or b.size == 0:
        raise ValueError("Hausdorff distance is undefined for empty clouds")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def hausdorff_distance(a: PointCloud, b: PointCloud) -> float:
    """Exact Hausdorff distance between finite clouds, index-accelerated;
    equals the double-loop oracle bit for bit."""
    _check_clouds(a, b)
    ia, ib = build_index(PointSet(a.points)), build_index(PointSet(b.points))
    d_ab = knn_radii(ib, a.points, 1).max()
    d_ba = knn_radii(ia, b.points, 1).max()
    return float(max(d_ab, d_ba))


def hausdorff_distance_bruteforce(a: PointCloud, b: PointCloud) -> float:
    """Double-loop oracle for hausdorff_distance."""
    _check_clouds(a, b)

    def directed(src, dst):
        best = 0.0
        for p in src:
            best = max(best, float(np.sqrt(_sq_dists(dst, p).min())))
        return best

    return max(directed(a.points, b.points), directed(b.points, a.points))


@dataclass(frozen=True)
class MaximaEstimate:
    argmax_index: int
    location: np.ndarray
    value: float


def estimate_maxima(reg: Regressor) -> MaximaEstimate:
    """Sample point with the highest prediction; ties break to the smallest
    sample index."""
    preds = predict_batch(reg, reg.data.x.points)
    i = int(np.argmax(preds))
    return MaximaEstimate(argmax_index=i, location=reg.data.x.points[i],
                          value=float(preds[i]))


def count_distinct_knn_sets(data: Dataset, k: int, probes,
                            chunk: int = 2048) -> int:
    """Number of distinct tie-inclusive neighbor sets seen over the probes.

    A lower bound on the true count over the continuum.  Full-scan
    evaluation, intended for the modest n of the combinatorial experiments.
    """
    ps = as_point_set(probes)
    pts = data.x.points
    if ps.dim != data.x.dim:
        raise ValueError("probe dimension does not match the dataset")
    n = data.n
    k = int(k)
    if not (1 <= k <= n):
        raise ValueError(f"k={k} outside [1, n={n}]")
    seen = set()
    for lo in range(0, ps.n, chunk):
        qc = ps.points[lo:lo + chunk]
        d2 = ((qc[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
        masks = d2 <= kth[:, None]
        packed = np.packbits(masks, axis=1)
        seen.update(row.tobytes() for row in packed)
    return len(seen)
