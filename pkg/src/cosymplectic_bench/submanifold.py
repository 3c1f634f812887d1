"""Pointwise submanifold data and the intrinsic invariants obtained from it.

A :class:`SubmanifoldPoint` holds orthonormal tangent and normal frames at a
point (as rows of ambient vectors) together with the second fundamental form
coefficients ``h[r, i, j] = g(h(e_i, e_j), e_{n+2+r})``.  Tangent vectors are
handled in frame coordinates; ambient coordinates only appear where ``phi``
acts.

Gauss equation convention::

    R(X, Y, Z, W) = R~(X, Y, Z, W) + g(h(X, W), h(Y, Z)) - g(h(X, Z), h(Y, W))

so that ``K(u, v) = R(u, v, v, u)`` and ``tau = sum_{i<j} K(e_i, e_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .ambient import AmbientModel, ambient_curvature, make_standard_structure
from .numerics import (
    ORTHO_TOL,
    complete_basis,
    gram_schmidt,
    make_rng,
    orthonormality_error,
    seeded_random_orthonormal_frame,
)

PLANE_TOL = 1e-8
GEOMETRIC_TOL = 1e-12


class InvalidPointError(ValueError):
    """Submanifold data violates an invariant; ``path`` names the offending field."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(frozen=True, eq=False)
class SubmanifoldPoint:
    ambient: AmbientModel
    tangent_frame: np.ndarray = field(repr=False)
    normal_frame: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    geometric_mode: bool = True

    def __post_init__(self):
        dim = self.ambient.dim
        tangent = np.array(self.tangent_frame, dtype=float, ndmin=2)
        normal = np.array(self.normal_frame, dtype=float).reshape(-1, dim)
        h = np.array(self.h, dtype=float)
        if tangent.ndim != 2 or tangent.shape[1] != dim:
            raise InvalidPointError(f"expected rows of length {dim}", "tangent_frame")
        d = tangent.shape[0]
        if d < 3:
            raise InvalidPointError("need at least 3 tangent vectors (n >= 2)", "tangent_frame")
        if d + normal.shape[0] != dim:
            raise InvalidPointError(
                f"expected {dim - d} normal vectors, got {normal.shape[0]}", "normal_frame"
            )
        if h.shape != (dim - d, d, d):
            raise InvalidPointError(f"expected shape {(dim - d, d, d)}, got {h.shape}", "h")
        for name, arr in (("tangent_frame", tangent), ("normal_frame", normal), ("h", h)):
            if not np.all(np.isfinite(arr)):
                raise InvalidPointError("non-finite entries", name)
        if orthonormality_error(np.vstack([tangent, normal])) > ORTHO_TOL:
            raise InvalidPointError("combined frame is not orthonormal", "tangent_frame")
        xi = self.ambient.xi
        eta = tangent @ xi
        if np.linalg.norm(xi - eta @ tangent) > ORTHO_TOL:
            raise InvalidPointError("structure vector xi is not tangent", "tangent_frame")
        for r, i, j in zip(*np.nonzero(h != np.swapaxes(h, 1, 2))):
            if i < j:
                raise InvalidPointError("second fundamental form is not symmetric", f"h[{r}][{i}][{j}]")
        if self.geometric_mode and h.size:
            scale = max(1.0, float(np.max(np.abs(h))))
            if np.max(np.abs(h @ eta)) > GEOMETRIC_TOL * scale:
                raise InvalidPointError("geometric mode requires h(X, xi) = 0", "h")
        for arr in (tangent, normal, h):
            arr.setflags(write=False)
        object.__setattr__(self, "tangent_frame", tangent)
        object.__setattr__(self, "normal_frame", normal)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        """The submanifold has dimension ``n + 1``."""
        return self.tangent_frame.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.tangent_frame.shape[0]

    @property
    def codim(self) -> int:
        return self.normal_frame.shape[0]

    @property
    def c(self) -> float:
        return self.ambient.c

    @cached_property
    def eta(self) -> np.ndarray:
        """Components of ``xi`` in the tangent frame."""
        return self.tangent_frame @ self.ambient.xi

    @cached_property
    def split(self) -> "TangentPhiSplit":
        return phi_split(self)

    @cached_property
    def curvature_tensor(self) -> np.ndarray:
        """Induced curvature tensor ``R[i, j, k, l] = R(e_i, e_j, e_k, e_l)``."""
        d = self.dim
        P = self.split.P
        eta = self.eta
        I = np.eye(d)
        amb = (
            np.einsum("il,jk->ijkl", I, I)
            - np.einsum("ik,jl->ijkl", I, I)
            + np.einsum("il,jk->ijkl", P, P)
            - np.einsum("ik,jl->ijkl", P, P)
            - 2.0 * np.einsum("ij,kl->ijkl", P, P)
            - np.einsum("il,j,k->ijkl", I, eta, eta)
            + np.einsum("ik,j,l->ijkl", I, eta, eta)
            - np.einsum("jk,i,l->ijkl", I, eta, eta)
            + np.einsum("jl,i,k->ijkl", I, eta, eta)
        )
        h = self.h
        gauss = np.einsum("ril,rjk->ijkl", h, h) - np.einsum("rik,rjl->ijkl", h, h)
        return self.c / 4.0 * amb + gauss

    def lift(self, x) -> np.ndarray:
        """Ambient vector for tangent-frame coordinates ``x``."""
        return np.asarray(x, dtype=float) @ self.tangent_frame

    def shape_operators(self) -> np.ndarray:
        """Stack of shape operator matrices ``A_r`` in the tangent frame."""
        return self.h.copy()

    def with_h(self, h, geometric_mode: bool | None = None) -> "SubmanifoldPoint":
        mode = self.geometric_mode if geometric_mode is None else geometric_mode
        return SubmanifoldPoint(self.ambient, self.tangent_frame, self.normal_frame, h, mode)


@dataclass(frozen=True)
class PlaneSection:
    """Orthonormal pair ``(u, v)`` of tangent-frame coordinate vectors."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        v = np.array(self.v, dtype=float)
        if u.shape != v.shape or u.ndim != 1:
            raise ValueError("plane vectors must be 1-d and of equal length")
        gram_det = (u @ u) * (v @ v) - (u @ v) ** 2
        if gram_det < PLANE_TOL:
            raise ValueError(f"degenerate plane (Gram determinant {gram_det:.3e})")
        if abs(u @ u - 1.0) > PLANE_TOL or abs(v @ v - 1.0) > PLANE_TOL or abs(u @ v) > PLANE_TOL:
            raise ValueError("plane basis must be orthonormal; use PlaneSection.spanned_by")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def spanned_by(cls, a, b) -> "PlaneSection":
        """Plane spanned by two arbitrary vectors, orthonormalized."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0 or nb == 0:
            raise ValueError("degenerate plane (zero vector)")
        a, b = a / na, b / nb
        gram_det = 1.0 - (a @ b) ** 2
        if gram_det < PLANE_TOL:
            raise ValueError(f"degenerate plane (Gram determinant {gram_det:.3e})")
        u, v = gram_schmidt([a, b])
        return cls(u, v)

    @classmethod
    def coordinate(cls, i: int, j: int, dim: int) -> "PlaneSection":
        """``span{e_i, e_j}`` with 0-based frame indices."""
        eye = np.eye(dim)
        return cls(eye[i], eye[j])

    def rotated(self, angle: float) -> "PlaneSection":
        ca, sa = np.cos(angle), np.sin(angle)
        return PlaneSection(ca * self.u + sa * self.v, -sa * self.u + ca * self.v)


@dataclass(frozen=True)
class TangentPhiSplit:
    """``phi X = P X + F X`` in frame coordinates: ``P`` is (n+1)x(n+1), ``F`` codim x (n+1)."""

    P: np.ndarray
    F: np.ndarray


def phi_split(pt: SubmanifoldPoint) -> TangentPhiSplit:
    """Tangential and normal parts of ``phi`` on the tangent space."""
    phi = pt.ambient.phi
    image = phi @ pt.tangent_frame.T  # columns: phi e_i
    return TangentPhiSplit(P=pt.tangent_frame @ image, F=pt.normal_frame @ image)


def split_reconstruction_error(pt: SubmanifoldPoint, split: TangentPhiSplit | None = None) -> float:
    split = split or phi_split(pt)
    image = pt.ambient.phi @ pt.tangent_frame.T
    rebuilt = pt.tangent_frame.T @ split.P + pt.normal_frame.T @ split.F
    return float(np.max(np.abs(image - rebuilt)))


def p_norm_squared(split: TangentPhiSplit) -> float:
    return float(np.sum(split.P**2))


def alpha_beta(pt: SubmanifoldPoint, plane: PlaneSection) -> tuple[float, float]:
    """``alpha = g(u, P v)^2`` and ``beta = eta(u)^2 + eta(v)^2`` for the plane."""
    P = pt.split.P
    alpha = float((plane.u @ P @ plane.v) ** 2)
    beta = float((pt.eta @ plane.u) ** 2 + (pt.eta @ plane.v) ** 2)
    return alpha, beta


def mean_curvature(pt: SubmanifoldPoint) -> np.ndarray:
    """Mean curvature vector in normal-frame coordinates."""
    return np.trace(pt.h, axis1=1, axis2=2) / pt.dim


def mean_curvature_norm2(pt: SubmanifoldPoint) -> float:
    H = mean_curvature(pt)
    return float(H @ H)


def h_norm_squared(pt: SubmanifoldPoint) -> float:
    return float(np.sum(pt.h**2))


def second_fundamental_form(pt: SubmanifoldPoint, X, Y) -> np.ndarray:
    """``h(X, Y)`` in normal-frame coordinates for tangent-frame vectors."""
    return np.einsum("rij,i,j->r", pt.h, np.asarray(X, float), np.asarray(Y, float))


def induced_curvature(pt: SubmanifoldPoint, X, Y, Z, W) -> float:
    """Intrinsic curvature tensor from the Gauss equation (tangent-frame inputs)."""
    amb = ambient_curvature(pt.ambient, pt.lift(X), pt.lift(Y), pt.lift(Z), pt.lift(W))
    hxw = second_fundamental_form(pt, X, W)
    hyz = second_fundamental_form(pt, Y, Z)
    hxz = second_fundamental_form(pt, X, Z)
    hyw = second_fundamental_form(pt, Y, W)
    return amb + float(hxw @ hyz - hxz @ hyw)


def sectional_curvature(pt: SubmanifoldPoint, plane: PlaneSection) -> float:
    u, v = plane.u, plane.v
    return float(np.einsum("ijkl,i,j,k,l->", pt.curvature_tensor, u, v, v, u))


def coordinate_sectional_curvatures(pt: SubmanifoldPoint) -> np.ndarray:
    """Matrix ``K[i, j] = K(span{e_i, e_j})`` (zero diagonal)."""
    R = pt.curvature_tensor
    return np.einsum("ijji->ij", R) * (1.0 - np.eye(pt.dim))


def scalar_curvature(pt: SubmanifoldPoint) -> float:
    """``tau = sum_{i<j} K(e_i, e_j)``."""
    K = coordinate_sectional_curvatures(pt)
    return float(np.sum(np.triu(K, 1)))


def scalar_curvature_gauss_form(pt: SubmanifoldPoint) -> float:
    """``tau`` from ``2 tau = (c/4)(3|P|^2 + n(n-1)) + (n+1)^2 |H|^2 - |h|^2``."""
    n = pt.n
    two_tau = (
        pt.c / 4.0 * (3.0 * p_norm_squared(pt.split) + n * (n - 1))
        + (n + 1) ** 2 * mean_curvature_norm2(pt)
        - h_norm_squared(pt)
    )
    return 0.5 * two_tau


def _relative(residual: float, *terms: float) -> float:
    return abs(residual) / max(1.0, *(abs(t) for t in terms))


def scalar_identity_residual(pt: SubmanifoldPoint) -> float:
    """Relative residual of the Gauss-equation identity for ``2 tau``."""
    n = pt.n
    tau = scalar_curvature(pt)
    amb = pt.c / 4.0 * (3.0 * p_norm_squared(pt.split) + n * (n - 1))
    hh = (n + 1) ** 2 * mean_curvature_norm2(pt)
    hn = h_norm_squared(pt)
    return _relative(2.0 * tau - (amb + hh - hn), 2.0 * tau, amb, hh, hn)


def rho(pt: SubmanifoldPoint) -> float:
    n = pt.n
    return (
        2.0 * scalar_curvature(pt)
        - (n + 1) ** 2 * (n - 1) / n * mean_curvature_norm2(pt)
        - pt.c / 4.0 * (3.0 * p_norm_squared(pt.split) + n * (n - 1))
    )


def rho_identity_residual(pt: SubmanifoldPoint) -> float:
    """Relative residual of ``(n+1)^2 |H|^2 = n (|h|^2 + rho)``."""
    n = pt.n
    lhs = (n + 1) ** 2 * mean_curvature_norm2(pt)
    hn, r = h_norm_squared(pt), rho(pt)
    return _relative(lhs - n * (hn + r), lhs, n * hn, n * r)


# -- instance generation -----------------------------------------------------


def unitary_rotation(m: int, rng) -> np.ndarray:
    """Random orthogonal map of R^(2m+1) commuting with phi and fixing xi."""
    rng = make_rng(rng)
    z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    a, b = q.real, q.imag
    out = np.zeros((2 * m + 1, 2 * m + 1))
    out[:m, :m] = a
    out[:m, m : 2 * m] = -b
    out[m : 2 * m, :m] = b
    out[m : 2 * m, m : 2 * m] = a
    out[-1, -1] = 1.0
    return out


def structured_tangent_space(m: int, kind: str, n: int, rank_p: int | None = None) -> np.ndarray:
    """Coordinate basis (rows, xi first) of a tangent space of the given kind."""
    eye = np.eye(2 * m + 1)
    xi = eye[-1]
    x = lambda i: eye[i]  # noqa: E731
    y = lambda i: eye[m + i]  # noqa: E731
    if kind == "invariant":
        if n % 2 or n // 2 > m:
            raise ValueError("invariant tangent spaces need even n <= 2m")
        rows = [v for i in range(n // 2) for v in (x(i), y(i))]
    elif kind == "anti_invariant":
        if n > m:
            raise ValueError("anti-invariant tangent spaces need n <= m")
        rows = [x(i) for i in range(n)]
    elif kind == "semi_invariant":
        k = 1 if rank_p is None else rank_p // 2
        l = n - 2 * k
        if k < 1 or l < 1 or k + l > m:
            raise ValueError(f"cannot fit a semi-invariant space with n={n}, m={m}, rank {2 * k}")
        rows = [v for i in range(k) for v in (x(i), y(i))] + [x(k + i) for i in range(l)]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return np.array([xi, *rows])


def random_point(
    seed,
    n: int,
    m: int,
    c: float | None = None,
    geometric_mode: bool = True,
    kind: str = "generic",
    h_scale: float = 2.0,
    rank_p: int | None = None,
) -> SubmanifoldPoint:
    """Seeded random submanifold point with ``xi = e_1``.

    ``kind="generic"`` draws a random frame; the other kinds ("invariant",
    "anti_invariant", "semi_invariant") start from a coordinate tangent space of
    that type and apply a random rotation commuting with ``phi``.  The second
    fundamental form is uniform on ``[-h_scale, h_scale]`` (upper triangle,
    mirrored) with the ``xi`` row and column zeroed in geometric mode; ``c`` is
    uniform on ``[-4, 4]`` when not given.
    """
    if n < 2 or n > 2 * m:
        raise ValueError(f"need 2 <= n <= 2m, got n={n}, m={m}")
    rng = make_rng(seed)
    c = float(rng.uniform(-4.0, 4.0)) if c is None else float(c)
    dim = 2 * m + 1
    d = n + 1
    ambient = make_standard_structure(m, c)
    if kind == "generic":
        frame = seeded_random_orthonormal_frame(dim, fixed_first=ambient.xi, seed=rng)
    else:
        base = structured_tangent_space(m, kind, n, rank_p)
        rot = unitary_rotation(m, rng)
        tangent = base @ rot.T
        inner = seeded_random_orthonormal_frame(d - 1, seed=rng)
        tangent[1:] = inner @ tangent[1:]
        frame = complete_basis(tangent, dim)
        frame[0] = ambient.xi
    tangent, normal = frame[:d], frame[d:]
    upper = np.triu(rng.uniform(-h_scale, h_scale, size=(dim - d, d, d)))
    h = upper + np.swapaxes(upper, 1, 2) - upper * np.eye(d)
    if geometric_mode:
        h[:, 0, :] = 0.0
        h[:, :, 0] = 0.0
    return SubmanifoldPoint(ambient, tangent, normal, h, geometric_mode)
