"""k-NN regression: the estimator, its empirical radius, and sup-norm error.

The prediction at x is the unweighted mean of the observations over the
tie-inclusive neighbor set N_k(x); when ties inflate the set beyond k the
mean divides by the actual member count.  Scalar and batch prediction paths
share arithmetic and agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .neighbors import (PointSet, SpatialIndex, as_point_set, build_index,
                        knn_query, _REL_SLACK)


@dataclass(frozen=True)
class Dataset:
    """Sample points with one scalar noisy observation per point."""

    x: PointSet
    y: np.ndarray

    def __post_init__(self):
        y = np.array(self.y, dtype=np.float64).reshape(-1)
        if y.shape[0] != self.x.n:
            raise ValueError(f"got {y.shape[0]} observations for {self.x.n} points")
        if not np.isfinite(y).all():
            raise ValueError("observations contain non-finite values")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.n


@dataclass(frozen=True)
class FieldMetadata:
    """Declared constants of a ground-truth field, exact by construction.

    alpha/c_alpha: smoothness |f(x)-f(x')| <= c_alpha * |x-x'|^alpha.
    level/beta/c_low/c_high/r_m: level-boundary regularity at `level`,
        c_low * d(x, boundary)^beta <= |level - f(x)| <= c_high * d^beta
        within distance r_m of the boundary.
    argmax/peak_value: unique maximizer, with quadratic pinch constants
        c_low/c_high when the field declares them for maxima estimation.
    """

    alpha: Optional[float] = None
    c_alpha: Optional[float] = None
    level: Optional[float] = None
    beta: Optional[float] = None
    c_low: Optional[float] = None
    c_high: Optional[float] = None
    r_m: Optional[float] = None
    argmax: Optional[np.ndarray] = None
    peak_value: Optional[float] = None


@dataclass(frozen=True)
class ScalarField:
    """Deterministic scalar function on R^D with optional declared constants.

    `fn` maps an (m, D) array to an (m,) array.  `modulus`, when present,
    is the exact closed-form modulus of continuity u(x, r) of the formula
    defining the field (support truncation ignored).
    """

    dim: int
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    metadata: FieldMetadata = field(default_factory=FieldMetadata)
    modulus: Optional[Callable[[np.ndarray, float], float]] = field(
        default=None, repr=False)
    name: str = ""

    def evaluate(self, x):
        """Evaluate at a single point (D,) -> float or a batch (m, D) -> (m,)."""
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim == 1:
            return float(self.fn(arr.reshape(1, -1))[0])
        return np.asarray(self.fn(arr), dtype=np.float64)


@dataclass(frozen=True)
class Regressor:
    data: Dataset
    index: SpatialIndex
    k: int

    def __post_init__(self):
        if not (1 <= self.k <= self.data.n):
            raise ValueError(f"k={self.k} outside [1, n={self.data.n}]")
        if self.index.source is not self.data.x and not np.array_equal(
                self.index.source.points, self.data.x.points):
            raise ValueError("index must be built over the dataset's points")


def make_regressor(data: Dataset, k: int) -> Regressor:
    return Regressor(data=data, index=build_index(data.x), k=int(k))


def _mean_over(y: np.ndarray, members: np.ndarray) -> float:
    # Shared by the scalar path and the batch fallback: sum over members in
    # ascending index order, divide by the member count.
    return float(np.sum(y[members]) / members.size)


def predict(reg: Regressor, query) -> float:
    """Mean observation over the tie-inclusive neighbor set of the query."""
    ns = knn_query(reg.index, query, reg.k)
    return _mean_over(reg.data.y, ns.member_indices)


def predict_batch(reg: Regressor, queries, chunk: int = 4096) -> np.ndarray:
    """Vectorized predict; exactly equal to a per-query predict loop.

    Rows with a clear gap after the k-th neighbor are averaged in bulk;
    rows with boundary ties fall back to the exact scalar path.
    """
    ps = reg.index.source
    Q = np.asarray(queries, dtype=np.float64)
    if Q.ndim == 1:
        Q = Q.reshape(-1, ps.dim) if ps.dim > 1 else Q.reshape(-1, 1)
    if Q.shape[1] != ps.dim:
        raise ValueError(f"queries have dimension {Q.shape[1]}, index has {ps.dim}")
    n, k, y = ps.n, reg.k, reg.data.y
    out = np.empty(Q.shape[0], dtype=np.float64)

    if k == n:
        all_members = np.arange(n)
        out.fill(_mean_over(y, all_members))
        return out

    kq = k + 1
    for lo in range(0, Q.shape[0], chunk):
        qc = Q[lo:lo + chunk]
        d, idx = reg.index._tree.query(qc, k=kq)
        d = d.reshape(len(qc), kq)
        idx = idx.reshape(len(qc), kq)
        fast = d[:, k] > d[:, k - 1] * (1.0 + _REL_SLACK)
        if fast.any():
            members = np.sort(idx[fast, :k], axis=1)
            out[lo:lo + chunk][fast] = y[members].sum(axis=1) / k
        for row in np.flatnonzero(~fast):
            ns = knn_query(reg.index, qc[row], k)
            out[lo + row] = _mean_over(y, ns.member_indices)
    return out


def knn_radius(reg: Regressor, query) -> float:
    """The k-NN radius r_k at the query."""
    return knn_query(reg.index, query, reg.k).radius


@dataclass(frozen=True)
class SupErrorResult:
    sup: float
    argmax_probe: int
    per_probe: np.ndarray


def sup_error(reg: Regressor, fld: ScalarField, probes) -> SupErrorResult:
    """Max over probe points of |prediction - truth| (grid surrogate for the
    sup over the whole domain)."""
    ps = as_point_set(probes)
    if ps.dim != reg.data.x.dim:
        raise ValueError("probe dimension does not match the dataset")
    preds = predict_batch(reg, ps.points)
    per = np.abs(preds - fld.evaluate(ps.points))
    i = int(np.argmax(per))
    return SupErrorResult(sup=float(per[i]), argmax_probe=i, per_probe=per)


@dataclass(frozen=True)
class ModulusEstimate:
    value: float
    exact: bool  # False: sampled lower bound on the true modulus


def _ball_probes(x: np.ndarray, r: float, resolution: int) -> np.ndarray:
    """Deterministic probe cloud in the closed ball B(x, r): the center, the
    2D axis-aligned boundary points, and a Halton fill."""
    from scipy.stats import norm, qmc

    d = x.shape[0]
    pts = [x]
    for i in range(d):
        e = np.zeros(d)
        e[i] = r
        pts.append(x + e)
        pts.append(x - e)
    base = np.asarray(pts)
    extra = resolution - base.shape[0]
    if extra > 0 and r > 0.0:
        u = qmc.Halton(d=d + 1, scramble=False).random(extra + 1)[1:]
        u = np.clip(u, 1e-12, 1.0 - 1e-12)
        z = norm.ppf(u[:, :d])
        norms = np.linalg.norm(z, axis=1, keepdims=True)
        z = np.where(norms > 0.0, z / np.where(norms > 0.0, norms, 1.0), 0.0)
        z[(norms == 0.0).reshape(-1), 0] = 1.0  # degenerate row: pick an axis
        radii = r * u[:, d] ** (1.0 / d)
        base = np.vstack([base, x + z * radii[:, None]])
    return base


def empirical_modulus(fld: ScalarField, x, r: float,
                      resolution: int = 256) -> ModulusEstimate:
    """Modulus of continuity u(x, r): exact closed form when the field
    declares one, otherwise a sampled lower bound (flagged approximate)."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != fld.dim:
        raise ValueError(f"point has dimension {x.shape[0]}, field has {fld.dim}")
    r = float(r)
    if r < 0.0:
        raise ValueError("radius must be nonnegative")
    if fld.modulus is not None:
        return ModulusEstimate(value=float(fld.modulus(x, r)), exact=True)
    probes = _ball_probes(x, r, resolution)
    fx = fld.evaluate(x)
    vals = np.abs(fld.evaluate(probes) - fx)
    return ModulusEstimate(value=float(vals.max()), exact=False)


def write_dataset(path, data: Dataset) -> None:
    """Plain-text dataset: first line `D n`, then n rows of D coordinates
    followed by the observation, whitespace-separated."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{data.x.dim} {data.n}\n")
        for row, yi in zip(data.x.points, data.y):
            cols = [("%.17g" % v) for v in row] + [("%.17g" % yi)]
            f.write(" ".join(cols) + "\n")


def read_dataset(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'D n'")
        dim, n = int(header[0]), int(header[1])
        rows = np.loadtxt(f, dtype=np.float64, ndmin=2)
    if rows.shape != (n, dim + 1):
        raise ValueError(
            f"{path}: expected {n} rows of {dim + 1} columns, got {rows.shape}")
    return Dataset(x=PointSet(rows[:, :dim]), y=rows[:, dim])
