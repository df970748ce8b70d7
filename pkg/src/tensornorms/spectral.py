"""Grid-based approximation scheme for the tensor spectral norm.

The scheme enumerates a hemisphere grid in the small first mode, reduces
each grid point to a matrix spectral norm, and certifies the result with
the grid's covering coefficient: the grid maximum lies within a factor
theta of the true norm, so [value, value/theta] is a certified interval.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .core import Tensor3, TensorD, contract_first, evaluate, flatten
from .grids import (
    ProductPointSet,
    UnitPointSet,
    build_hemisphere_grid,
    resolution_for_error,
)
from .kernels import spectral_norm, top_singular_pair

__all__ = [
    "NormEstimate",
    "lower_bound_alpha1",
    "upper_bound_alpha2",
    "spectral_norm_fptas",
    "spectral_norm_fptas_d",
    "best_rank_one",
    "polish_rank_one",
    "estimate_to_dict",
    "estimate_from_dict",
]

_SVD_CHUNK = 20000


@dataclass(frozen=True)
class NormEstimate:
    """A norm value with certified lower/upper bounds.

    ``witness`` holds the maximizing unit vectors, one per tensor mode,
    when available.
    """

    value: float
    lower: float
    upper: float
    mode: str  # "absolute" or "relative"
    epsilon: float
    certified: bool
    grid_points_used: int
    q: int | None = None
    theta: float | None = None
    witness: tuple[np.ndarray, ...] | None = None
    seconds: float | None = None


def lower_bound_alpha1(T: Tensor3) -> tuple[float, tuple[np.ndarray, ...]]:
    """Lower bound from the top singular pairs of the slices.

    For each slice take its top singular pair (y_i, z_i) and score
    sum_j (y_i' T_j z_i)^2; the best pair also yields the witness x as the
    normalized vector of bilinear slice values.
    """
    ell, m, n = T.dims
    best_val, best_witness = -np.inf, None
    for i in range(ell):
        _, y, z = top_singular_pair(T.slices[i])
        u = T.slices @ z @ y  # u_j = y' T_j z
        score = float(u @ u)
        if score > best_val:
            x = u / np.linalg.norm(u) if np.linalg.norm(u) > 0 else np.eye(ell)[0]
            best_val, best_witness = score, (x, y, z)
    return float(np.sqrt(best_val)), best_witness


def upper_bound_alpha2(T: Tensor3) -> float:
    """min of the flattening spectral norm and the slice-partition bound."""
    flat = spectral_norm(flatten(T))
    slice_norms = np.linalg.svd(T.slices, compute_uv=False)[:, 0]
    return float(min(flat, np.sqrt(np.sum(slice_norms**2))))


def _grid_max(slices: np.ndarray, points: np.ndarray) -> tuple[int, float]:
    """(argmax index, max) of sigma_max(sum_i x_i T_i) over point rows.

    Ties break to the first point in enumeration order, independently of
    chunking.
    """
    best_idx, best_val = 0, -np.inf
    for start in range(0, points.shape[0], _SVD_CHUNK):
        chunk = points[start:start + _SVD_CHUNK]
        mats = np.tensordot(chunk, slices, axes=(1, 0))
        vals = np.linalg.svd(mats, compute_uv=False)[:, 0]
        idx = int(np.argmax(vals))
        if vals[idx] > best_val:
            best_idx, best_val = start + idx, float(vals[idx])
    return best_idx, best_val


def spectral_norm_fptas(
    T: Tensor3,
    epsilon: float,
    mode: str = "relative",
    point_set: UnitPointSet | None = None,
) -> NormEstimate:
    """Certified spectral norm approximation by hemisphere-grid enumeration.

    The returned value is the grid maximum, a lower bound; for deterministic
    grids value/theta is a certified upper bound with gap at most epsilon
    (absolute or relative per ``mode``).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if mode not in ("absolute", "relative"):
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    ell, m, n = T.dims

    if ell == 1:
        sigma, y, z = top_singular_pair(T.slices[0])
        return NormEstimate(
            value=sigma, lower=sigma, upper=sigma, mode=mode, epsilon=epsilon,
            certified=True, grid_points_used=0,
            witness=(np.ones(1), y, z), seconds=time.perf_counter() - t0,
        )

    q = None
    if point_set is None:
        scale = upper_bound_alpha2(T) if mode == "absolute" else 1.0
        q = resolution_for_error(ell, epsilon, scale)
        point_set = build_hemisphere_grid(ell, q)
    elif point_set.spec is not None:
        q = point_set.spec.resolution
    if len(point_set) == 0:
        raise ValueError("point set is empty")
    if point_set.dim != ell:
        raise ValueError(f"point set dim {point_set.dim} != first tensor dim {ell}")

    idx, value = _grid_max(T.slices, point_set.points)
    xstar = point_set.points[idx]
    _, y, z = top_singular_pair(contract_first(T, xstar))

    theta = point_set.theta
    if theta is not None:
        upper = value / theta
        certified = True
    else:
        upper = upper_bound_alpha2(T)
        certified = False
    return NormEstimate(
        value=value, lower=value, upper=upper, mode=mode, epsilon=epsilon,
        certified=certified, grid_points_used=len(point_set), q=q, theta=theta,
        witness=(xstar, y, z), seconds=time.perf_counter() - t0,
    )


def _sorted_last_two_perm(dims: tuple[int, ...]) -> list[int]:
    """Mode permutation placing the two largest dimensions last (stable)."""
    order = sorted(range(len(dims)), key=lambda i: (dims[i], i))
    small, large = order[:-2], order[-2:]
    return sorted(small) + sorted(large)


def _product_grid_for(dims_small, epsilon: float, scale: float) -> ProductPointSet:
    """One hemisphere grid per small mode, splitting the error budget evenly."""
    from .grids import product_point_set

    eps_each = epsilon / len(dims_small)
    sets = [
        build_hemisphere_grid(d, resolution_for_error(d, eps_each, scale))
        for d in dims_small
    ]
    return product_point_set(sets)


def spectral_norm_fptas_d(
    T: TensorD,
    epsilon: float,
    mode: str = "relative",
    point_set: ProductPointSet | None = None,
) -> NormEstimate:
    """Higher-order variant: product hemisphere grids over all but two modes.

    Contracting a tensor by a tuple of leading-mode vectors equals contracting
    the leading-modes flattening by their Kronecker product, so the order-3
    machinery applies to the reshaped tensor directly.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    t0 = time.perf_counter()
    dims = T.dims
    perm = _sorted_last_two_perm(dims)
    vals = np.transpose(T.values, perm)
    small_dims = vals.shape[:-2]
    m, n = vals.shape[-2:]
    T3 = Tensor3(vals.reshape(int(np.prod(small_dims)), m, n))

    if point_set is None:
        scale = upper_bound_alpha2(T3) if mode == "absolute" else 1.0
        point_set = _product_grid_for(small_dims, epsilon, scale)
    flat_points = point_set.flattened()

    est = spectral_norm_fptas(T3, epsilon, mode, flat_points)

    # unpack the Kronecker witness into per-mode factors in original order
    witness = None
    if est.witness is not None:
        kron_x, y, z = est.witness
        idx = _kron_index(point_set, kron_x)
        factors = [s.points[i] for s, i in zip(point_set.sets, idx)]
        by_perm = factors + [y, z]
        witness = tuple(by_perm[perm.index(i)] for i in range(len(dims)))
    return replace(est, witness=witness, seconds=time.perf_counter() - t0)


def _kron_index(point_set: ProductPointSet, kron_x: np.ndarray) -> tuple[int, ...]:
    """Recover per-factor indices of a flattened product point."""
    sizes = [len(s) for s in point_set.sets]
    flat = point_set.flattened().points
    pos = int(np.argmax(flat @ kron_x))
    idx = []
    for size in reversed(sizes):
        idx.append(pos % size)
        pos //= size
    return tuple(reversed(idx))


def best_rank_one(
    T: Tensor3, est: NormEstimate
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray, float]:
    """Best rank-one term at the estimate's witness, with residual.

    For unit factors the optimal multiplier is the trilinear value itself and
    the residual satisfies residual^2 = ||T||_F^2 - lambda^2.
    """
    if est.witness is None:
        raise ValueError("estimate has no witness")
    x, y, z = est.witness
    lam = evaluate(T, x, y, z)
    diff = T.slices - lam * np.einsum("i,j,k->ijk", x, y, z)
    residual = float(np.linalg.norm(diff))
    return lam, x, y, z, residual


def polish_rank_one(
    T: Tensor3,
    x: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
    max_iters: int = 100,
    tol: float = 1e-12,
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Alternating local improvement of a rank-one witness.

    Each sweep sets x proportional to the mode-1 contraction at (y, z), then
    replaces (y, z) by the top singular pair at x; the objective never
    decreases.
    """
    x = np.asarray(x, float).copy()
    obj = evaluate(T, x, y, z)
    for _ in range(max_iters):
        u = T.slices @ z @ y
        norm_u = np.linalg.norm(u)
        if norm_u > 0:
            x = u / norm_u
        sigma, y, z = top_singular_pair(contract_first(T, x))
        if sigma - obj <= tol * max(1.0, abs(obj)):
            obj = sigma
            break
        obj = sigma
    return obj, x, y, z


# --- serialization ---------------------------------------------------------

def estimate_to_dict(est: NormEstimate) -> dict:
    witness = None
    if est.witness is not None:
        keys = ["x", "y", "z"] if len(est.witness) == 3 else [
            f"x{i+1}" for i in range(len(est.witness))
        ]
        witness = {k: v.tolist() for k, v in zip(keys, est.witness)}
    return {
        "value": est.value,
        "lower": est.lower,
        "upper": est.upper,
        "epsilon": est.epsilon,
        "mode": est.mode,
        "certified": est.certified,
        "q": est.q,
        "theta": est.theta,
        "grid_points": est.grid_points_used,
        "witness": witness,
        "seconds": est.seconds,
    }


def estimate_from_dict(d: dict) -> NormEstimate:
    witness = None
    if d.get("witness") is not None:
        witness = tuple(np.asarray(v, float) for v in d["witness"].values())
    return NormEstimate(
        value=d["value"], lower=d["lower"], upper=d["upper"], mode=d["mode"],
        epsilon=d["epsilon"], certified=d["certified"],
        grid_points_used=d["grid_points"], q=d.get("q"), theta=d.get("theta"),
        witness=witness, seconds=d.get("seconds"),
    )
