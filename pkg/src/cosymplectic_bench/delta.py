"""Minimum sectional curvature over tangent 2-planes and the invariant tau - inf K.

Sectional curvature is evaluated as the quadratic form of the curvature
operator on the bivector ``u ^ v``, which keeps batch evaluation cheap.  Three
routes to ``inf K`` are provided:

* a deterministic brute-force sample of planes (an upper bound),
* local descent by Givens rotations from many starts (the production value),
* the smallest eigenvalue of the curvature operator (a lower bound, exact when
  the tangent space is 3-dimensional because every bivector is decomposable).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .numerics import make_rng, random_unit_vectors, sym_eigen
from .submanifold import PlaneSection, SubmanifoldPoint, scalar_curvature

DEFAULT_RESTARTS = 64
DEFAULT_MAX_ITERS = 500
DEFAULT_GRID = 48
CONVERGENCE_TOL = 1e-12
TIE_TOL = 1e-12


class MinSearch(NamedTuple):
    value: float
    plane: PlaneSection
    converged: bool
    starts: int


@dataclass(frozen=True)
class DeltaResult:
    delta: float
    inf_k: float
    tau: float
    minimizing_plane: PlaneSection
    eigen_lower_bound: float
    restarts_used: int
    grid_resolution: int
    converged: bool


def _pairs(dim: int) -> tuple[np.ndarray, np.ndarray]:
    ij = np.array(list(combinations(range(dim), 2)))
    return ij[:, 0], ij[:, 1]


def curvature_operator_matrix(pt: SubmanifoldPoint) -> np.ndarray:
    """Matrix of the curvature operator on the bivectors ``e_i ^ e_j`` (i < j).

    Entry ``[(ij), (kl)] = R(e_i, e_j, e_l, e_k)``, so that
    ``K(u, v) = b^T Q b`` with ``b = u ^ v``.
    """
    i, j = _pairs(pt.dim)
    R = pt.curvature_tensor
    Q = R[i[:, None], j[:, None], j[None, :], i[None, :]]
    return 0.5 * (Q + Q.T)


def wedge(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Bivector coordinates of ``u ^ v`` for (batched) vectors."""
    i, j = _pairs(u.shape[-1])
    return u[..., i] * v[..., j] - u[..., j] * v[..., i]


def _quad(Q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...p,pq,...q->...", a, Q, b)


def sectional_batch(Q: np.ndarray, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    b = wedge(U, V)
    return _quad(Q, b, b)


def curvature_operator_bound(pt: SubmanifoldPoint) -> float:
    """Smallest eigenvalue of the curvature operator; a lower bound for inf K."""
    eigvals, _ = sym_eigen(curvature_operator_matrix(pt))
    return float(eigvals[0])


# -- deterministic plane sample ----------------------------------------------


def _fibonacci_hemisphere(count: int) -> np.ndarray:
    k = np.arange(count) + 0.5
    z = k / count  # z in (0, 1): one normal per unoriented plane
    phi = np.pi * (1.0 + np.sqrt(5.0)) * k
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _quasi_sphere(count: int, dim: int) -> np.ndarray:
    if dim == 1:
        return np.ones((1, 1))
    if dim == 2:
        t = np.pi * np.arange(count) / count
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    if dim == 3:
        return _fibonacci_hemisphere(count)
    sampler = qmc.Halton(d=dim, scramble=False)
    sampler.fast_forward(1)  # skip the origin, which maps to -inf
    g = ndtri(sampler.random(count))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _perp_bases(U: np.ndarray) -> np.ndarray:
    """For unit rows ``u``, an orthonormal basis of ``u``-perp (batched Householder)."""
    dim = U.shape[1]
    s = np.where(U[:, 0] >= 0, 1.0, -1.0)
    w = U.copy()
    w[:, 0] += s
    H = np.eye(dim)[None] - 2.0 * w[:, :, None] * w[:, None, :] / np.sum(w * w, axis=1)[:, None, None]
    return np.transpose(H[:, :, 1:], (0, 2, 1))  # (count, dim-1, dim)


def _coordinate_planes(dim: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = _pairs(dim)
    eye = np.eye(dim)
    return eye[i], eye[j]


def plane_grid(dim: int, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic quasi-uniform sample of 2-planes in R^dim.

    Coordinate planes always come first.  For ``dim == 3`` planes are indexed by
    ``resolution**2`` unit normals on a Fibonacci hemisphere; otherwise
    ``resolution**2`` directions ``u`` are paired with ``resolution`` directions
    ``v`` in ``u``-perp.
    """
    if resolution < 4:
        raise ValueError("resolution must be >= 4")
    cu, cv = _coordinate_planes(dim)
    if dim == 2:
        return cu, cv
    if dim == 3:
        normals = _fibonacci_hemisphere(resolution**2)
        basis = _perp_bases(normals)
        U, V = basis[:, 0], basis[:, 1]
    else:
        us = _quasi_sphere(resolution**2, dim)
        vs = _quasi_sphere(resolution, dim - 1)
        basis = _perp_bases(us)  # (nu, dim-1, dim)
        V = np.einsum("kd,ude->uke", vs, basis).reshape(-1, dim)
        U = np.repeat(us, len(vs), axis=0)
    return np.vstack([cu, U]), np.vstack([cv, V])


def inf_sectional_bruteforce(pt: SubmanifoldPoint, resolution: int = DEFAULT_GRID):
    """Minimum of K over :func:`plane_grid`; an upper bound on the infimum.

    Returns ``(value, plane)``; ties resolve to the first plane in grid order.
    """
    Q = curvature_operator_matrix(pt)
    U, V = plane_grid(pt.dim, resolution)
    K = sectional_batch(Q, U, V)
    k = int(np.argmin(K))
    return float(K[k]), PlaneSection.spanned_by(U[k], V[k])


# -- local descent ---------------------------------------------------------------


def _complements(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Orthonormal completion of each pair ``(u, v)``: shape (S, dim-2, dim)."""
    dim = U.shape[1]
    M = np.concatenate([U[:, :, None], V[:, :, None], np.broadcast_to(np.eye(dim), (len(U), dim, dim))], axis=2)
    q, _ = np.linalg.qr(M, mode="reduced")  # first two columns span (u, v)
    return np.transpose(q[:, :, 2:dim], (0, 2, 1))


def _orthonormal_pairs(U: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    U = U / np.linalg.norm(U, axis=1, keepdims=True)
    V = V - np.sum(U * V, axis=1, keepdims=True) * U
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    return U, V


def local_descent(Q: np.ndarray, U: np.ndarray, V: np.ndarray, max_iters: int = DEFAULT_MAX_ITERS):
    """Batched Givens-rotation descent of ``K(u, v)`` on the Grassmannian.

    Each sweep rotates ``u`` and then ``v`` towards every direction of the
    orthogonal complement by the exactly minimizing angle, so K never
    increases.  Returns ``(U, V, values, converged)``.
    """
    U, V = _orthonormal_pairs(np.array(U, float), np.array(V, float))
    S, dim = U.shape
    values = sectional_batch(Q, U, V)
    converged = np.zeros(S, dtype=bool)
    if dim < 3:
        return U, V, values, np.ones(S, dtype=bool)
    W = _complements(U, V)
    for _ in range(max_iters):
        active = ~converged
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        u, v, w = U[idx], V[idx], W[idx]
        start = sectional_batch(Q, u, v)
        for k in range(dim - 2):
            for moving in (0, 1):
                x, y = (u, v) if moving == 0 else (v, u)
                wk = w[:, k]
                bxy = wedge(x, y)
                bwy = wedge(wk, y)
                a = _quad(Q, bxy, bxy)
                cc = _quad(Q, bwy, bwy)
                b = _quad(Q, bxy, bwy)
                two_theta = np.arctan2(-b, -(a - cc) / 2.0)
                ct, st = np.cos(two_theta / 2.0), np.sin(two_theta / 2.0)
                x_new = ct[:, None] * x + st[:, None] * wk
                w[:, k] = -st[:, None] * x + ct[:, None] * wk
                if moving == 0:
                    u = x_new
                else:
                    v = x_new
        end = sectional_batch(Q, u, v)
        U[idx], V[idx], W[idx] = u, v, w
        values[idx] = end
        converged[idx] = (start - end) < CONVERGENCE_TOL
    U, V = _orthonormal_pairs(U, V)
    return U, V, sectional_batch(Q, U, V), converged


def _pick(values: np.ndarray) -> int:
    best = np.min(values)
    return int(np.nonzero(values <= best + TIE_TOL)[0][0])


def inf_sectional_optimize(
    pt: SubmanifoldPoint,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    grid_resolution: int = DEFAULT_GRID,
    seed=0,
) -> MinSearch:
    """Minimum found of K over 2-planes.

    Starts, in order: every coordinate plane, the best plane of the
    brute-force grid at ``grid_resolution``, then ``restarts`` random planes.
    The result is never worse than any evaluated start, hence never worse
    than :func:`inf_sectional_bruteforce` at the same resolution.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    Q = curvature_operator_matrix(pt)
    dim = pt.dim
    grid_value, grid_plane = inf_sectional_bruteforce(pt, grid_resolution)
    cu, cv = _coordinate_planes(dim)
    rng = make_rng(seed)
    ru = random_unit_vectors(rng, restarts, dim)
    rv = random_unit_vectors(rng, restarts, dim)
    U0 = np.vstack([cu, grid_plane.u[None], ru])
    V0 = np.vstack([cv, grid_plane.v[None], rv])
    U0, V0 = _orthonormal_pairs(U0, V0)
    start_values = sectional_batch(Q, U0, V0)
    start_values[len(cu)] = grid_value
    U, V, values, converged = local_descent(Q, U0, V0, max_iters)

    # descent results first, then the raw starts, each in seed order
    all_values = np.concatenate([values, start_values])
    k = _pick(all_values)
    if k < len(values):
        plane = PlaneSection(U[k], V[k])
    else:
        j = k - len(values)
        plane = grid_plane if j == len(cu) else PlaneSection(U0[j], V0[j])
    return MinSearch(float(all_values[k]), plane, bool(converged[k % len(values)]), len(U0))


def refine(pt: SubmanifoldPoint, plane: PlaneSection, max_iters: int = DEFAULT_MAX_ITERS) -> MinSearch:
    """Local descent from a single given plane."""
    Q = curvature_operator_matrix(pt)
    U, V, values, converged = local_descent(Q, plane.u[None], plane.v[None], max_iters)
    return MinSearch(float(values[0]), PlaneSection(U[0], V[0]), bool(converged[0]), 1)


def delta_invariant(
    pt: SubmanifoldPoint,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    grid_resolution: int = DEFAULT_GRID,
    seed=0,
) -> DeltaResult:
    """``tau - inf K`` with the infimum taken as the minimum found by the optimizer."""
    search = inf_sectional_optimize(pt, restarts, max_iters, grid_resolution, seed)
    tau = scalar_curvature(pt)
    return DeltaResult(
        delta=tau - search.value,
        inf_k=search.value,
        tau=tau,
        minimizing_plane=search.plane,
        eigen_lower_bound=curvature_operator_bound(pt),
        restarts_used=search.starts,
        grid_resolution=grid_resolution,
        converged=search.converged,
    )
