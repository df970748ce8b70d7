"""Spherical-coordinate grids on the unit sphere and hemisphere.

The deterministic grids discretize the angular coordinates with step
pi/q.  Their covering quality is summarized by a coefficient theta:
every unit vector has inner product at least theta with some grid point
(up to the sign flip the callers exploit), with
theta = 1 - pi^2 (ell-1) / (8 q^2).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import product as _iterproduct

import numpy as np

__all__ = [
    "GridSpec",
    "UnitPointSet",
    "spherical_to_cartesian",
    "build_hemisphere_grid",
    "build_sphere_grid",
    "covering_coefficient",
    "hemisphere_point_count",
    "resolution_for_error",
    "sample_uniform",
    "ProductPointSet",
    "product_point_set",
    "export_csv",
]


@dataclass(frozen=True)
class GridSpec:
    """Discretization parameters: dimension, resolution q, step pi/q, kind."""

    dim: int
    resolution: int | None
    kind: str  # "hemisphere", "full-sphere" or "uniform-random"
    seed: int | None = None
    count: int | None = None

    @property
    def step(self) -> float | None:
        if self.resolution is None:
            return None
        return math.pi / self.resolution


@dataclass(frozen=True)
class UnitPointSet:
    """A finite set of unit vectors, with covering coefficient when deterministic."""

    dim: int
    points: np.ndarray  # (count, dim)
    theta: float | None
    spec: GridSpec | None = None

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must have shape (count, {self.dim})")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def spherical_to_cartesian(phi: np.ndarray) -> np.ndarray:
    """Unit vector in R^(len(phi)+1) from angular coordinates.

    All angles but the last lie in [0, pi]; the last lies in [0, 2*pi).
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if phi.size < 1:
        raise ValueError("need at least one angle")
    if np.any(phi[:-1] < 0) or np.any(phi[:-1] > math.pi):
        raise ValueError("angles before the last must lie in [0, pi]")
    if phi[-1] < 0 or phi[-1] >= 2 * math.pi:
        raise ValueError("last angle must lie in [0, 2*pi)")
    return _angles_to_points(phi[None, :])[0]


def _angles_to_points(phis: np.ndarray) -> np.ndarray:
    """Batch conversion of (count, ell-1) angle rows to (count, ell) unit vectors."""
    count, k = phis.shape
    out = np.empty((count, k + 1))
    sin_prod = np.ones(count)
    for j in range(k):
        out[:, j] = sin_prod * np.cos(phis[:, j])
        sin_prod = sin_prod * np.sin(phis[:, j])
    out[:, k] = sin_prod
    return out


def _enumerate_angle_indices(levels: list[int], closed: bool = False) -> list[tuple[int, ...]]:
    """Angle-index tuples with trailing entries pinned to 0 after a zero index.

    Once some angle is 0 (or, with ``closed``, pi) the remaining Cartesian
    coordinates vanish, so any later angle choice would duplicate a point;
    the enumeration simply stops descending there.  ``closed`` additionally
    includes the angle pi for every coordinate but the last, which full-sphere
    grids need so that directions near the negative first axis stay covered.
    """
    tuples: list[tuple[int, ...]] = []

    def descend(prefix: tuple[int, ...], depth: int) -> None:
        if depth == len(levels):
            tuples.append(prefix)
            return
        tail = (0,) * (len(levels) - depth)
        tuples.append(prefix + tail)
        for idx in range(1, levels[depth]):
            descend(prefix + (idx,), depth + 1)
        if closed and depth < len(levels) - 1:
            tuples.append(prefix + (levels[depth],) + tail[1:])

    descend((), 0)
    return tuples


def hemisphere_point_count(ell: int, q: int) -> int:
    """Closed-form size of the deduplicated hemisphere grid."""
    if q == 2:
        return ell
    return ((q - 1) ** ell - 1) // (q - 2)


def covering_coefficient(q: int, ell: int) -> float:
    """theta = 1 - pi^2 (ell-1) / (8 q^2)."""
    if q < 1 or ell < 2:
        raise ValueError("need q >= 1 and ell >= 2")
    return 1.0 - math.pi**2 * (ell - 1) / (8.0 * q * q)


def build_hemisphere_grid(ell: int, q: int) -> UnitPointSet:
    """Deduplicated hemisphere grid: all angles on {0, d, ..., (q-1)d}, d = pi/q."""
    if ell < 2 or q < 2:
        raise ValueError("need ell >= 2 and q >= 2")
    delta = math.pi / q
    tuples = _enumerate_angle_indices([q] * (ell - 1))
    phis = np.array(tuples, dtype=float) * delta
    points = _angles_to_points(phis)
    spec = GridSpec(dim=ell, resolution=q, kind="hemisphere")
    return UnitPointSet(ell, points, covering_coefficient(q, ell), spec)


def build_sphere_grid(ell: int, q: int) -> UnitPointSet:
    """Full-sphere grid: last angle ranges over {0, ..., (2q-1)d}, d = pi/q."""
    if ell < 2 or q < 2:
        raise ValueError("need ell >= 2 and q >= 2")
    delta = math.pi / q
    tuples = _enumerate_angle_indices([q] * (ell - 2) + [2 * q], closed=True)
    phis = np.array(tuples, dtype=float) * delta
    points = _angles_to_points(phis)
    spec = GridSpec(dim=ell, resolution=q, kind="full-sphere")
    return UnitPointSet(ell, points, covering_coefficient(q, ell), spec)


def resolution_for_error(ell: int, epsilon: float, scale: float = 1.0) -> int:
    """Smallest grid resolution certifying an error of epsilon.

    ``scale`` is the norm upper bound for absolute-error targets and 1 for
    relative-error targets.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    q = math.ceil(math.sqrt(math.pi**2 * (ell - 1) * scale / (8.0 * epsilon)))
    return max(q, 2)


def sample_uniform(ell: int, count: int, seed: int) -> UnitPointSet:
    """Points i.i.d. uniform on the unit sphere (normalized Gaussian draws)."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, ell))
    points = g / np.linalg.norm(g, axis=1, keepdims=True)
    spec = GridSpec(dim=ell, resolution=None, kind="uniform-random",
                    seed=seed, count=count)
    return UnitPointSet(ell, points, None, spec)


class ProductPointSet:
    """Lazy Cartesian product of unit point sets.

    Iterating yields tuples of vectors; ``theta`` is the product of member
    covering coefficients when all are present, else None.
    """

    def __init__(self, sets: list[UnitPointSet]):
        if not sets:
            raise ValueError("need at least one point set")
        self.sets = list(sets)

    def __len__(self) -> int:
        return int(np.prod([len(s) for s in self.sets]))

    def __iter__(self):
        return _iterproduct(*(s.points for s in self.sets))

    @property
    def theta(self) -> float | None:
        thetas = [s.theta for s in self.sets]
        if any(t is None for t in thetas):
            return None
        return float(np.prod(thetas))

    def flattened(self) -> UnitPointSet:
        """All products as single unit vectors via Kronecker products.

        The kron of unit vectors is again a unit vector, and contracting a
        tensor by the tuple equals contracting its first-modes flattening by
        the kron vector.
        """
        mats = [s.points for s in self.sets]
        acc = mats[0]
        for m in mats[1:]:
            acc = np.einsum("pa,qb->pqab", acc, m).reshape(
                acc.shape[0] * m.shape[0], acc.shape[1] * m.shape[1]
            )
        return UnitPointSet(acc.shape[1], acc, self.theta)


def product_point_set(sets: list[UnitPointSet]) -> ProductPointSet:
    return ProductPointSet(sets)


def export_csv(point_set: UnitPointSet, path: str) -> None:
    """One unit vector per row."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        for row in point_set.points:
            writer.writerow([repr(float(v)) for v in row])
