"""Pointwise model of a cosymplectic space form of constant phi-sectional curvature.

The ambient tangent space is R^(2m+1) with coordinates ordered
``(x_1, ..., x_m, y_1, ..., y_m, t)``.  The metric is the identity in these
coordinates, ``phi`` sends ``d/dx_i`` to ``d/dy_i`` and ``d/dy_i`` to
``-d/dx_i``, and the structure vector ``xi`` is ``d/dt``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

STRUCTURE_TOL = 1e-10


@dataclass(frozen=True)
class AmbientModel:
    """Almost contact metric structure ``(phi, xi, eta, g)`` plus curvature ``c``.

    ``eta`` is always the metric dual of ``xi`` and ``g`` is the identity, so
    neither is stored separately.
    """

    m: int
    c: float
    phi: np.ndarray = field(repr=False)
    xi: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        dim = 2 * self.m + 1
        phi = np.array(self.phi, dtype=float)
        xi = np.array(self.xi, dtype=float)
        if phi.shape != (dim, dim) or xi.shape != (dim,):
            raise ValueError(f"phi must be {dim}x{dim} and xi of length {dim}")
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(xi)) and np.isfinite(self.c)):
            raise ValueError("structure tensors and c must be finite")
        phi.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return 2 * self.m + 1

    @property
    def eta(self) -> np.ndarray:
        return self.xi


def make_standard_structure(m: int, c: float) -> AmbientModel:
    """The canonical cosymplectic structure on R^(2m+1) with curvature ``c``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    dim = 2 * m + 1
    phi = np.zeros((dim, dim))
    for i in range(m):
        phi[m + i, i] = 1.0  # phi(d/dx_i) = d/dy_i
        phi[i, m + i] = -1.0  # phi(d/dy_i) = -d/dx_i
    xi = np.zeros(dim)
    xi[-1] = 1.0
    return AmbientModel(m=m, c=c, phi=phi, xi=xi)


@dataclass(frozen=True)
class StructureReport:
    phi_squared: float
    eta_xi: float
    phi_xi: float
    eta_phi: float
    compatibility: float
    skew: float
    tol: float = STRUCTURE_TOL

    @property
    def residuals(self) -> dict[str, float]:
        return {
            "phi_squared": self.phi_squared,
            "eta_xi": self.eta_xi,
            "phi_xi": self.phi_xi,
            "eta_phi": self.eta_phi,
            "compatibility": self.compatibility,
            "skew": self.skew,
        }

    @property
    def passed(self) -> bool:
        return all(v < self.tol for v in self.residuals.values())


def check_almost_contact(model: AmbientModel, tol: float = STRUCTURE_TOL) -> StructureReport:
    """Max-abs residual of each almost contact metric identity."""
    phi, xi = model.phi, model.xi
    eye = np.eye(model.dim)
    eta = xi  # metric dual under the identity metric
    return StructureReport(
        phi_squared=float(np.max(np.abs(phi @ phi + eye - np.outer(xi, eta)))),
        eta_xi=float(abs(eta @ xi - 1.0)),
        phi_xi=float(np.max(np.abs(phi @ xi))),
        eta_phi=float(np.max(np.abs(eta @ phi))),
        compatibility=float(np.max(np.abs(phi.T @ phi - eye + np.outer(eta, eta)))),
        skew=float(np.max(np.abs(phi + phi.T))),
        tol=tol,
    )


def ambient_curvature(model: AmbientModel, X, Y, Z, W) -> float:
    """Curvature tensor value R(X, Y, Z, W) of the space form.

    Sign convention: the sectional curvature of an orthonormal pair is
    ``R(u, v, v, u)``.
    """
    X, Y, Z, W = (np.asarray(a, dtype=float) for a in (X, Y, Z, W))
    phi, eta = model.phi, model.xi
    g = np.dot
    ex, ey, ez, ew = g(eta, X), g(eta, Y), g(eta, Z), g(eta, W)
    total = (
        g(X, W) * g(Y, Z)
        - g(X, Z) * g(Y, W)
        + g(X, phi @ W) * g(Y, phi @ Z)
        - g(X, phi @ Z) * g(Y, phi @ W)
        - 2.0 * g(X, phi @ Y) * g(Z, phi @ W)
        - g(X, W) * ey * ez
        + g(X, Z) * ey * ew
        - g(Y, Z) * ex * ew
        + g(Y, W) * ex * ez
    )
    return model.c / 4.0 * float(total)


def _check_plane(u: np.ndarray, v: np.ndarray, tol: float = 1e-8) -> None:
    if abs(u @ u - 1.0) > tol or abs(v @ v - 1.0) > tol or abs(u @ v) > tol:
        gram_det = (u @ u) * (v @ v) - (u @ v) ** 2
        if gram_det < tol:
            raise ValueError(f"degenerate plane (Gram determinant {gram_det:.3e})")
        raise ValueError("plane basis must be orthonormal")


def ambient_sectional(model: AmbientModel, u, v) -> float:
    """Sectional curvature of the ambient plane spanned by orthonormal ``u, v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_plane(u, v)
    return ambient_curvature(model, u, v, v, u)


def ambient_sectional_closed_form(model: AmbientModel, u, v) -> float:
    """``(c/4)(1 + 3 g(u, phi v)^2 - eta(u)^2 - eta(v)^2)`` for an orthonormal pair."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return model.c / 4.0 * (1.0 + 3.0 * (u @ model.phi @ v) ** 2 - (u @ model.xi) ** 2 - (v @ model.xi) ** 2)

