"""Submanifold points from explicit immersions into the flat cosymplectic R^(2m+1).

An immersion has product form ``(u, t) -> (F(u), t)`` with ``F: R^n -> R^(2m)``
so the structure vector ``xi = d/dt`` is always tangent.  Frames and the second
fundamental form are obtained by central finite differences, with a Richardson
cross-check against a doubled step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ambient import make_standard_structure
from .numerics import RankDeficiencyError, complete_basis, gram_schmidt
from .submanifold import SubmanifoldPoint

DEFAULT_FD_STEP = 1e-4
RICHARDSON_TOL = 0.1
XI_ROW_TOL = 1e-6


class FiniteDifferenceError(ValueError):
    """Finite-difference second derivatives are dominated by cancellation."""


@dataclass(frozen=True)
class ImmersionSpec:
    """``base_map`` sends ``u`` (length n) to the first 2m ambient coordinates."""

    ambient_m: int
    base_map: Callable[[np.ndarray], np.ndarray]
    base_point: np.ndarray
    fd_step: float = DEFAULT_FD_STEP
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "base_point", np.asarray(self.base_point, dtype=float))
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")
        if self.ambient_m < 1:
            raise ValueError("ambient_m must be >= 1")

    @property
    def n(self) -> int:
        return len(self.base_point)

    def evaluate(self, params) -> np.ndarray:
        """Ambient point for parameters ``(t, u_1, ..., u_n)``."""
        params = np.asarray(params, dtype=float)
        head = np.asarray(self.base_map(params[1:]), dtype=float)
        if head.shape != (2 * self.ambient_m,):
            raise ValueError(f"base_map must return {2 * self.ambient_m} coordinates")
        return np.append(head, params[0])

    def with_step(self, fd_step: float) -> "ImmersionSpec":
        return ImmersionSpec(self.ambient_m, self.base_map, self.base_point, fd_step, self.name)


def _params0(spec: ImmersionSpec) -> np.ndarray:
    return np.concatenate([[0.0], spec.base_point])


def _jacobian(spec: ImmersionSpec, step: float) -> np.ndarray:
    """Columns: d/dt (exactly xi), then central differences in each u_k."""
    p0 = _params0(spec)
    dim = 2 * spec.ambient_m + 1
    J = np.zeros((dim, spec.n + 1))
    J[-1, 0] = 1.0
    for k in range(1, spec.n + 1):
        e = np.zeros_like(p0)
        e[k] = step
        J[:, k] = (spec.evaluate(p0 + e) - spec.evaluate(p0 - e)) / (2.0 * step)
    return J


def frame_at(spec: ImmersionSpec, step: float | None = None):
    """Orthonormal tangent frame (xi first) and completing normal frame.

    Also returns the parameter directions ``D`` (columns, in ``(t, u)``
    coordinates) whose images under the Jacobian are the tangent frame.
    """
    step = spec.fd_step if step is None else step
    J = _jacobian(spec, step)
    try:
        tangent = gram_schmidt(J.T)
    except RankDeficiencyError as exc:
        raise RankDeficiencyError(f"immersion is not regular at the base point: {exc}") from exc
    D, *_ = np.linalg.lstsq(J, tangent.T, rcond=None)
    D[0, 1:] = 0.0  # the u-columns of J have no t-component
    basis = complete_basis(tangent)
    normal = basis[spec.n + 1 :]
    # deterministic orientation: largest component of each normal positive
    idx = np.argmax(np.abs(normal), axis=1)
    normal *= np.sign(normal[np.arange(len(normal)), idx])[:, None]
    return tangent, normal, D


def _hessian_normal(spec: ImmersionSpec, normal: np.ndarray, D: np.ndarray, step: float) -> np.ndarray:
    p0 = _params0(spec)
    f0 = spec.evaluate(p0)
    d = D.shape[1]
    hess = np.zeros((d, d, len(f0)))
    for i in range(d):
        a = step * D[:, i]
        hess[i, i] = (spec.evaluate(p0 + a) - 2.0 * f0 + spec.evaluate(p0 - a)) / step**2
        for j in range(i + 1, d):
            b = step * D[:, j]
            val = (
                spec.evaluate(p0 + a + b)
                - spec.evaluate(p0 + a - b)
                - spec.evaluate(p0 - a + b)
                + spec.evaluate(p0 - a - b)
            ) / (4.0 * step**2)
            hess[i, j] = hess[j, i] = val
    return np.einsum("rk,ijk->rij", normal, hess)


def second_fundamental_form_at(spec: ImmersionSpec, frames=None) -> np.ndarray:
    """``h[r, i, j] = <normal_r, d^2 f / ds_i ds_j>`` along the tangent frame directions.

    Raises:
        FiniteDifferenceError: if the values at ``fd_step`` and ``2 fd_step``
            disagree by more than 10% of the coefficient scale.
    """
    tangent, normal, D = frame_at(spec) if frames is None else frames
    step = spec.fd_step
    h = _hessian_normal(spec, normal, D, step)
    h_coarse = _hessian_normal(spec, normal, D, 2.0 * step)
    scale = max(float(np.max(np.abs(h_coarse))) if h.size else 0.0, 1e-4)
    disagreement = float(np.max(np.abs(h - h_coarse))) if h.size else 0.0
    if disagreement > RICHARDSON_TOL * scale:
        raise FiniteDifferenceError(
            f"step {step:g} too small: h({step:g}) and h({2 * step:g}) differ by {disagreement:.3e}"
        )
    h = 0.5 * (h + np.swapaxes(h, 1, 2))
    if h.size and np.max(np.abs(h[:, 0, :])) > XI_ROW_TOL:
        raise FiniteDifferenceError("h(xi, .) is not zero; base_map must not depend on t")
    h[:, 0, :] = 0.0
    h[:, :, 0] = 0.0
    return h


def to_submanifold_point(spec: ImmersionSpec) -> SubmanifoldPoint:
    frames = frame_at(spec)
    h = second_fundamental_form_at(spec, frames)
    tangent, normal, _ = frames
    # orient each normal so that its shape operator has nonnegative trace
    signs = np.where(np.trace(h, axis1=1, axis2=2) < 0, -1.0, 1.0)
    normal = normal * signs[:, None]
    h = h * signs[:, None, None]
    return SubmanifoldPoint(make_standard_structure(spec.ambient_m, 0.0), tangent, normal, h, True)


# -- catalog ---------------------------------------------------------------------------------


def _sphere_map(r: float, k: int, m: int):
    """Round S^k(r) in the first k+1 ambient coordinates, hyperspherical angles."""

    def F(u):
        out = np.zeros(2 * m)
        s = r
        for i, angle in enumerate(u):
            out[i] = s * np.cos(angle)
            s *= np.sin(angle)
        out[k] = s
        return out

    return F


def _torus_map(r1: float, r2: float, m: int):
    """Circles of radii r1, r2 in the (x_1, y_1) and (x_2, y_2) planes, arclength parameters."""

    def F(u):
        out = np.zeros(2 * m)
        out[0], out[m] = r1 * np.cos(u[0] / r1), r1 * np.sin(u[0] / r1)
        out[1], out[m + 1] = r2 * np.cos(u[1] / r2), r2 * np.sin(u[1] / r2)
        return out

    return F


def _linear_map(n: int, m: int):
    def F(u):
        out = np.zeros(2 * m)
        out[:n] = u
        return out

    return F


CATALOG = ("linear_subspace", "sphere_product", "torus_product")


def builtin_catalog(name: str, fd_step: float = DEFAULT_FD_STEP, base_point=None, **params) -> ImmersionSpec:
    """Named immersion families.

    ``sphere_product(r=1, k=2, m=2)``
        ``S^k(r) x R``; needs ``k + 1 <= 2m``.
    ``torus_product(r1=1, r2=1, m=2)``
        ``S^1(r1) x S^1(r2) x R``; needs ``m >= 2``.
    ``linear_subspace(n=3, m=3)``
        The flat ``R^(n+1)`` through the origin spanned by ``x_1..x_n`` and ``xi``.
    """
    if name == "sphere_product":
        r, k, m = float(params.get("r", 1.0)), int(params.get("k", 2)), int(params.get("m", 2))
        if r <= 0 or k < 2 or k + 1 > 2 * m:
            raise ValueError(f"sphere_product needs r > 0, k >= 2, k + 1 <= 2m (got r={r}, k={k}, m={m})")
        # polar angles away from the coordinate singularities
        bp = np.full(k, 0.9) if base_point is None else base_point
        return ImmersionSpec(m, _sphere_map(r, k, m), bp, fd_step, name)
    if name == "torus_product":
        r1, r2, m = float(params.get("r1", 1.0)), float(params.get("r2", 1.0)), int(params.get("m", 2))
        if r1 <= 0 or r2 <= 0 or m < 2:
            raise ValueError("torus_product needs r1, r2 > 0 and m >= 2")
        bp = np.array([0.3, 0.7]) if base_point is None else base_point
        return ImmersionSpec(m, _torus_map(r1, r2, m), bp, fd_step, name)
    if name == "linear_subspace":
        n, m = int(params.get("n", 3)), int(params.get("m", 3))
        if n < 2 or n > 2 * m:
            raise ValueError("linear_subspace needs 2 <= n <= 2m")
        bp = np.zeros(n) if base_point is None else base_point
        return ImmersionSpec(m, _linear_map(n, m), bp, fd_step, name)
    raise ValueError(f"unknown immersion {name!r}; choose from {', '.join(CATALOG)}")
