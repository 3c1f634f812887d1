"""The Chen-type inequality for xi-tangent submanifolds and everything around it.

Main inequality, for a plane ``pi`` in the tangent space of an (n+1)-dimensional
submanifold of a cosymplectic space form of curvature ``c``::

    tau - K(pi) <= (n+1)^2 (n-1) / (2n) |H|^2
                   + c/8 (3 |P|^2 - 6 alpha(pi) + 2 beta(pi) + (n+1)(n-2))

Besides the check itself this module replays the argument behind it step by
step (:func:`proof_step_audit`), detects the equality configuration of the
shape operators, builds points attaining equality, evaluates the bounds on
``tau - inf K`` that follow for each sign of ``c``, classifies the tangent
space by its ``phi``-behaviour, and replays the argument that equality in the
``c > 0`` bound forces a totally geodesic submanifold.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np

from .ambient import make_standard_structure
from .numerics import complete_basis, seeded_random_orthonormal_frame
from .submanifold import (
    PlaneSection,
    SubmanifoldPoint,
    alpha_beta,
    h_norm_squared,
    mean_curvature,
    mean_curvature_norm2,
    p_norm_squared,
    rho,
    scalar_curvature,
    sectional_curvature,
)

SLACK_TOL = 1e-9
RANK_TOL = 1e-8
LEMMA_CONSTRAINT_TOL = 1e-9


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    EQUALITY = "equality"
    VIOLATED = "violated"


def verdict_for(slack: float, tol: float = SLACK_TOL) -> Verdict:
    if slack < -tol:
        return Verdict.VIOLATED
    if abs(slack) <= tol:
        return Verdict.EQUALITY
    return Verdict.HOLDS


def leading_coefficient(n: int) -> float:
    """Coefficient ``(n+1)^2 (n-1) / (2n)`` of ``|H|^2``."""
    return (n + 1) ** 2 * (n - 1) / (2.0 * n)


# -- Chen's algebraic lemma -------------------------------------------------------


@dataclass(frozen=True)
class LemmaInstance:
    """Reals ``a_1..a_{n+1}, a`` with ``(sum a_i)^2 = n (sum a_i^2 + a)``."""

    a_values: tuple[float, ...]
    a: float

    def __post_init__(self):
        vals = tuple(float(x) for x in self.a_values)
        object.__setattr__(self, "a_values", vals)
        if len(vals) < 2:
            raise ValueError("need at least two values (n >= 1)")
        s = sum(vals)
        lhs, rhs = s * s, self.n * (sum(x * x for x in vals) + self.a)
        if abs(lhs - rhs) > LEMMA_CONSTRAINT_TOL * max(1.0, abs(lhs), abs(rhs)):
            raise ValueError(f"instance is off the quadric: {lhs!r} != {rhs!r}")

    @property
    def n(self) -> int:
        return len(self.a_values) - 1

    @classmethod
    def on_quadric(cls, a_values) -> "LemmaInstance":
        """Solve the constraint for ``a``."""
        vals = np.asarray(a_values, dtype=float)
        n = len(vals) - 1
        return cls(tuple(vals), float(vals.sum() ** 2 / n - np.sum(vals**2)))


@dataclass(frozen=True)
class LemmaCheck:
    holds: bool
    equality: bool
    characterization: bool
    slack: float
    spread: float


def chen_lemma_check(inst: LemmaInstance, tol: float = SLACK_TOL) -> LemmaCheck:
    """Check ``2 a_1 a_2 >= a`` and compare equality with ``a_1 + a_2 = a_3 = ...``.

    ``spread`` is the sum of squared deviations of ``(a_1 + a_2, a_3, ...)``
    from their mean; the characterization is declared when ``spread <= tol``
    so both sides are compared in the same (quadratic) units.
    """
    a = inst.a_values
    slack = 2.0 * a[0] * a[1] - inst.a
    b = np.array([a[0] + a[1], *a[2:]])
    spread = float(np.sum((b - b.mean()) ** 2))
    return LemmaCheck(
        holds=slack >= -tol,
        equality=abs(slack) <= tol,
        characterization=spread <= tol,
        slack=float(slack),
        spread=spread,
    )


# -- adapted frames -----------------------------------------------------------------


@dataclass(frozen=True)
class AdaptedFrame:
    """Tangent/normal bases in which ``pi = span{e_1, e_2}``, ``H || e_{n+2}``, ``h^{n+2}_{12} = 0``.

    ``tangent`` rows are tangent-frame coordinates of the new ``e_i``;
    ``normal`` rows are normal-frame coordinates of the new normals; ``h`` is
    the second fundamental form in the new bases; ``P`` and ``eta`` likewise.
    """

    tangent: np.ndarray
    normal: np.ndarray
    h: np.ndarray
    P: np.ndarray
    eta: np.ndarray


def _normal_lead(pt: SubmanifoldPoint) -> np.ndarray:
    H = mean_curvature(pt)
    scale = max(1.0, float(np.max(np.abs(pt.h)))) if pt.h.size else 1.0
    if np.linalg.norm(H) > 1e-12 * scale:
        return H / np.linalg.norm(H)
    # H = 0: any unit normal works; take the one carrying the largest shape operator
    lead = np.zeros(pt.codim)
    lead[int(np.argmax(np.sum(pt.h**2, axis=(1, 2))))] = 1.0
    return lead


def _transform(h: np.ndarray, T: np.ndarray, N: np.ndarray) -> np.ndarray:
    return T @ np.tensordot(N, h, axes=1) @ T.T


def adapted_frame(pt: SubmanifoldPoint, plane: PlaneSection) -> AdaptedFrame:
    T = complete_basis([plane.u, plane.v], pt.dim)
    N = complete_basis([_normal_lead(pt)], pt.codim) if pt.codim else np.zeros((0, 0))
    h = _transform(pt.h, T, N)
    if pt.codim:
        a, b, c = h[0, 0, 0], h[0, 0, 1], h[0, 1, 1]
        theta = 0.5 * np.arctan2(2.0 * b, a - c)
        # smallest rotation that diagonalizes keeps e_1, e_2 close to the given plane basis
        if theta > np.pi / 4:
            theta -= np.pi / 2
        elif theta < -np.pi / 4:
            theta += np.pi / 2
        G = np.eye(pt.dim)
        G[:2, :2] = [[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]]
        T = G @ T
        h = G @ h @ G.T
    P = T @ pt.split.P @ T.T
    return AdaptedFrame(tangent=T, normal=N, h=h, P=P, eta=T @ pt.eta)


# -- the main inequality -----------------------------------------------------------------


@dataclass(frozen=True)
class EqualityResiduals:
    off_block: float  # conditions forcing the zero pattern of the shape operators
    lemma_diagonal: float  # h11 + h22 = h33 = ... for the H-direction
    h12: float

    @property
    def max(self) -> float:
        return max(self.off_block, self.lemma_diagonal, self.h12)


def equality_residuals(frame: AdaptedFrame) -> EqualityResiduals:
    h = frame.h
    if h.shape[0] == 0:
        return EqualityResiduals(0.0, 0.0, 0.0)
    lead, rest = h[0], h[1:]
    off = [np.abs(lead[:2, 2:]).ravel()]
    inner = lead[2:, 2:]
    off.append(np.abs(inner - np.diag(np.diag(inner))).ravel())
    if rest.size:
        off.append(np.abs(rest[:, :2, 2:]).ravel())
        off.append(np.abs(rest[:, 2:, 2:]).ravel())
        off.append(np.abs(rest[:, 0, 0] + rest[:, 1, 1]))
    off_block = float(max((np.max(o) for o in off if o.size), default=0.0))
    diag = np.diag(lead)
    lemma = float(np.max(np.abs(diag[0] + diag[1] - diag[2:]))) if len(diag) > 2 else 0.0
    return EqualityResiduals(off_block, lemma, float(abs(lead[0, 1])))


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    slack: float
    tau: float
    k_pi: float
    h_norm2: float
    mean_norm2: float
    p_norm2: float
    alpha: float
    beta: float
    rho: float
    n: int
    c: float
    equality_residuals: EqualityResiduals
    verdict: Verdict

    def to_dict(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict.value
        out["equality_residual_max"] = self.equality_residuals.max
        return out


def main_inequality(pt: SubmanifoldPoint, plane: PlaneSection, tol: float = SLACK_TOL) -> InequalityReport:
    n, c = pt.n, pt.c
    tau = scalar_curvature(pt)
    k_pi = sectional_curvature(pt, plane)
    alpha, beta = alpha_beta(pt, plane)
    p2 = p_norm_squared(pt.split)
    H2 = mean_curvature_norm2(pt)
    lhs = tau - k_pi
    rhs = leading_coefficient(n) * H2 + c / 8.0 * (3.0 * p2 - 6.0 * alpha + 2.0 * beta + (n + 1) * (n - 2))
    slack = rhs - lhs
    return InequalityReport(
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        tau=tau,
        k_pi=k_pi,
        h_norm2=h_norm_squared(pt),
        mean_norm2=H2,
        p_norm2=p2,
        alpha=alpha,
        beta=beta,
        rho=rho(pt),
        n=n,
        c=c,
        equality_residuals=equality_residuals(adapted_frame(pt, plane)),
        verdict=verdict_for(slack, tol),
    )


@dataclass(frozen=True)
class AuditReport:
    """Residuals of each step of the argument, in the adapted frame.

    ``rho_identity`` and ``constraint_identity`` are identities (relative
    residuals).  ``lemma_slack`` is ``h11 h22`` minus the lemma's lower bound,
    ``bound_slack`` is ``K(pi)`` minus the refined lower bound that keeps every
    square, ``dropped_terms`` is the sum of those squares, and ``final_slack``
    is ``K(pi) - (c/4)(1 + 3 alpha - beta) - rho/2``, equal to the slack of the
    main inequality.
    """

    rho_identity: float
    constraint_identity: float
    lemma_slack: float
    bound_slack: float
    dropped_terms: float
    final_slack: float
    main_slack: float
    tol: float = SLACK_TOL

    @property
    def slacks(self) -> dict[str, float]:
        return {
            "lemma": self.lemma_slack,
            "bound": self.bound_slack,
            "dropped_terms": self.dropped_terms,
            "final": self.final_slack,
        }

    @property
    def tight_steps(self) -> list[str]:
        return [k for k, v in self.slacks.items() if abs(v) <= self.tol]

    @property
    def passed(self) -> bool:
        return (
            self.rho_identity <= self.tol
            and self.constraint_identity <= self.tol
            and all(v >= -self.tol for v in self.slacks.values())
        )


def proof_step_audit(pt: SubmanifoldPoint, plane: PlaneSection, tol: float = SLACK_TOL) -> AuditReport:
    n, c = pt.n, pt.c
    frame = adapted_frame(pt, plane)
    h = frame.h
    r = rho(pt)
    hn = h_norm_squared(pt)
    H2 = mean_curvature_norm2(pt)
    scale = max(1.0, abs((n + 1) ** 2 * H2), abs(n * hn), abs(n * r))
    rho_identity = abs((n + 1) ** 2 * H2 - n * (hn + r)) / scale

    if pt.codim:
        lead, rest = h[0], h[1:]
    else:
        lead, rest = np.zeros((pt.dim, pt.dim)), np.zeros((0, pt.dim, pt.dim))
    diag = np.diag(lead)
    off_lead = np.sum(lead**2) - np.sum(diag**2)
    rest_sq = np.sum(rest**2)
    lemma_a = off_lead + rest_sq + r
    constraint = diag.sum() ** 2 - n * (np.sum(diag**2) + lemma_a)
    constraint_identity = abs(constraint) / max(scale, diag.sum() ** 2)
    lemma_slack = lead[0, 0] * lead[1, 1] - 0.5 * lemma_a

    alpha = float((frame.P[0, 1]) ** 2)
    beta = float(frame.eta[0] ** 2 + frame.eta[1] ** 2)
    ambient_part = c / 4.0 * (1.0 + 3.0 * alpha - beta)
    k_pi = ambient_part + lead[0, 0] * lead[1, 1] - lead[0, 1] ** 2
    k_pi += float(np.sum(rest[:, 0, 0] * rest[:, 1, 1] - rest[:, 0, 1] ** 2))

    lower = np.triu(np.ones((pt.dim - 2, pt.dim - 2)), 1)
    dropped = (
        np.sum(h[:, :2, 2:] ** 2)
        + np.sum(lead[2:, 2:] ** 2 * lower)
        + 0.5 * np.sum(rest[:, 2:, 2:] ** 2)
        + 0.5 * np.sum((rest[:, 0, 0] + rest[:, 1, 1]) ** 2)
    )
    # sum_{i != j > 2} counts each unordered pair twice; the 1/2 leaves one copy
    final_slack = k_pi - ambient_part - 0.5 * r
    bound_slack = final_slack - dropped
    report = main_inequality(pt, plane, tol)
    return AuditReport(
        rho_identity=float(rho_identity),
        constraint_identity=float(constraint_identity),
        lemma_slack=float(lemma_slack),
        bound_slack=float(bound_slack),
        dropped_terms=float(dropped),
        final_slack=float(final_slack),
        main_slack=report.slack,
        tol=tol,
    )


# -- equality configuration -------------------------------------------------------------------


@dataclass(frozen=True)
class ShapeCheck:
    ok: bool
    residuals: EqualityResiduals
    lam: float
    mu: float


def equality_shape_check(pt: SubmanifoldPoint, plane: PlaneSection, tol: float = SLACK_TOL) -> ShapeCheck:
    """Whether the shape operators take the equality form in the adapted frame.

    The adapted frame puts ``pi = span{e_1, e_2}``, ``H`` along the first normal
    and uses the remaining rotation freedom in ``pi`` to make ``h^{n+2}_{12}``
    vanish.  Then ``A_{n+2}`` must be ``diag(lam, mu, (lam + mu) I)`` and every
    other ``A_r`` a traceless 2x2 block bordered by zeros.
    """
    frame = adapted_frame(pt, plane)
    res = equality_residuals(frame)
    lam = float(frame.h[0, 0, 0]) if pt.codim else 0.0
    mu = float(frame.h[0, 1, 1]) if pt.codim else 0.0
    return ShapeCheck(ok=res.max <= tol, residuals=res, lam=lam, mu=mu)


def construct_equality_instance(
    n: int,
    m: int,
    c: float,
    lam: float,
    mu: float,
    blocks=(),
    xi_index: int | None = None,
    geometric_mode: bool = False,
    seed=0,
) -> SubmanifoldPoint:
    """A point whose shape operators have the equality form at ``span{e_1, e_2}``.

    ``blocks`` lists ``(h11, h12)`` for the normals after the first (missing
    entries are zero); each gives the block ``[[h11, h12], [h12, -h11]]``.
    ``xi_index`` is the 0-based tangent slot of ``xi`` (default: the last one).
    The remaining frame vectors are random but reproducible from ``seed``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    codim = 2 * m - n
    if codim < 1:
        raise ValueError(f"need 2m - n >= 1 normal directions, got m={m}, n={n}")
    blocks = [tuple(map(float, b)) for b in blocks]
    if len(blocks) > codim - 1:
        raise ValueError(f"at most {codim - 1} blocks fit in codimension {codim}")
    blocks += [(0.0, 0.0)] * (codim - 1 - len(blocks))
    d = n + 1
    xi_index = n if xi_index is None else xi_index
    if not 0 <= xi_index < d:
        raise ValueError(f"xi_index must be in [0, {d})")
    if geometric_mode:
        if xi_index >= 2 and lam + mu != 0.0:
            raise ValueError(f"xi in the (lam+mu)-block needs lam + mu = 0 for h(xi, xi) = 0, got {lam + mu}")
        if xi_index == 0 and (lam != 0.0 or any(b != (0.0, 0.0) for b in blocks)):
            raise ValueError("xi = e_1 needs lam = 0 and zero blocks for h(e_1, .) = 0")
        if xi_index == 1 and (mu != 0.0 or any(b != (0.0, 0.0) for b in blocks)):
            raise ValueError("xi = e_2 needs mu = 0 and zero blocks for h(e_2, .) = 0")

    ambient = make_standard_structure(m, c)
    frame = seeded_random_orthonormal_frame(ambient.dim, fixed_first=ambient.xi, seed=seed)
    tangent = np.delete(frame[:d], 0, axis=0)
    tangent = np.insert(tangent, xi_index, frame[0], axis=0)
    normal = frame[d:]

    h = np.zeros((codim, d, d))
    h[0] = np.diag([lam, mu] + [lam + mu] * (d - 2))
    for r, (b11, b12) in enumerate(blocks, start=1):
        h[r, :2, :2] = [[b11, b12], [b12, -b11]]
    return SubmanifoldPoint(ambient, tangent, normal, h, geometric_mode)


# -- consequences for tau - inf K -----------------------------------------------------------------


class CurvatureCase(str, enum.Enum):
    C_ZERO = "c_zero"
    C_NEGATIVE = "c_negative"
    C_POSITIVE = "c_positive"


def delta_upper_bound(pt: SubmanifoldPoint) -> tuple[float, CurvatureCase]:
    """Upper bound on ``tau - inf K`` depending on the sign of ``c``."""
    n, c = pt.n, pt.c
    base = leading_coefficient(n) * mean_curvature_norm2(pt)
    if c == 0:
        return base, CurvatureCase.C_ZERO
    if c < 0:
        return base + 0.5 * (n + 1) * (n - 2) * c / 4.0, CurvatureCase.C_NEGATIVE
    return base + 0.5 * n * (n + 2) * c / 4.0, CurvatureCase.C_POSITIVE


# -- classification ------------------------------------------------------------------------------


class SubmanifoldKind(str, enum.Enum):
    INVARIANT = "invariant"
    ANTI_INVARIANT = "anti_invariant"
    SEMI_INVARIANT = "semi_invariant"
    GENERIC = "generic"


@dataclass(frozen=True)
class ClassificationResult:
    kind: SubmanifoldKind
    rank_p: int
    dim_d_perp: int
    f_norm: float = field(repr=False)
    f_structure_residual: float = field(repr=False)

    @property
    def is_semi_invariant(self) -> bool:
        """Tangent space splits as D + D-perp + span(xi); includes both extreme cases."""
        return self.kind is not SubmanifoldKind.GENERIC

    @property
    def negative_case_type(self) -> bool:
        """Semi-invariant with rank P = 2, the type required for equality when c < 0."""
        return self.is_semi_invariant and self.rank_p == 2

    @property
    def positive_case_type(self) -> bool:
        """Invariant, the type required for equality when c > 0."""
        return self.kind is SubmanifoldKind.INVARIANT


def classify_submanifold(pt: SubmanifoldPoint, tol: float = RANK_TOL) -> ClassificationResult:
    """Pointwise type of the tangent space from the rank and kernel of ``P``.

    This is a proxy for the distribution-level notions: invariant when
    ``F = 0``, anti-invariant when ``P = 0``, semi-invariant when ``P`` is an
    f-structure (``P^3 + P = 0``: the image of ``P`` is phi-closed and its
    kernel off ``xi`` is mapped into the normal space), generic otherwise.
    """
    P, F = pt.split.P, pt.split.F
    sv = np.linalg.svd(P, compute_uv=False)
    rank_p = int(np.sum(sv > tol))
    f_norm = float(np.max(np.abs(F))) if F.size else 0.0
    f_res = float(np.max(np.abs(P @ P @ P + P)))
    if f_norm <= tol:
        kind = SubmanifoldKind.INVARIANT
    elif np.max(np.abs(P)) <= tol:
        kind = SubmanifoldKind.ANTI_INVARIANT
    elif f_res <= tol:
        kind = SubmanifoldKind.SEMI_INVARIANT
    else:
        kind = SubmanifoldKind.GENERIC
    return ClassificationResult(
        kind=kind,
        rank_p=rank_p,
        dim_d_perp=pt.dim - rank_p - 1,
        f_norm=f_norm,
        f_structure_residual=f_res,
    )


# -- totally geodesic replay -----------------------------------------------------------------


CERTIFICATE_STEPS = ("minimality", "anticommutation", "xi_column", "principal_curvature")


@dataclass(frozen=True)
class CertificateReport:
    verdict: str  # "totally_geodesic" or "hypotheses_inconsistent"
    residuals: dict[str, float]
    failed_steps: tuple[str, ...]
    max_h: float


def _default_xi_plane(pt: SubmanifoldPoint) -> PlaneSection:
    eta = pt.eta / np.linalg.norm(pt.eta)
    other = np.eye(pt.dim)[int(np.argmin(np.abs(eta)))]
    return PlaneSection.spanned_by(eta, other)


def totally_geodesic_certificate(
    pt: SubmanifoldPoint, plane: PlaneSection | None = None, tol: float = SLACK_TOL
) -> CertificateReport:
    """Replay the argument that equality in the ``c > 0`` bound forces ``h = 0``.

    The input must be invariant (``F = 0``) with shape operators in equality
    form at a plane containing ``xi``.  In the frame ``e_1 = xi``, ``e_2`` the
    other direction of the plane, the replay reports:

    * ``minimality``: ``max_r |trace A_r| / n`` (invariant implies minimal),
    * ``anticommutation``: ``max_r |A_r P + P A_r|``,
    * ``xi_column``: off-``xi`` entries of ``A_r xi`` (``A_r xi`` must be along ``xi``),
    * ``principal_curvature``: ``|A_r(P e_2) - c_r P e_2|`` with
      ``c_r = -h^r_{22}``; ``P e_2`` lies in the zero block so this is ``|c_r|``.

    The verdict is ``totally_geodesic`` iff every coefficient of ``h`` is within
    ``tol`` of zero; otherwise the failing steps are named.

    Raises:
        ValueError: if the point is not invariant, the plane misses ``xi``, or
            the shape operators are not in equality form.
    """
    cls = classify_submanifold(pt)
    if cls.kind is not SubmanifoldKind.INVARIANT:
        raise ValueError(f"certificate needs an invariant point, got {cls.kind.value}")
    plane = _default_xi_plane(pt) if plane is None else plane
    _, beta = alpha_beta(pt, plane)
    if beta < 1.0 - RANK_TOL:
        raise ValueError(f"plane must contain xi (beta = {beta:.6g})")
    shape = equality_shape_check(pt, plane, tol)
    if not shape.ok:
        raise ValueError(f"shape operators are not in equality form (residual {shape.residuals.max:.3e})")

    frame = adapted_frame(pt, plane)
    t1, t2 = frame.eta[0], frame.eta[1]
    norm = np.hypot(t1, t2)
    G = np.eye(pt.dim)
    G[:2, :2] = [[t1 / norm, t2 / norm], [-t2 / norm, t1 / norm]]
    T = G @ frame.tangent
    h = _transform(pt.h, T, frame.normal)
    P = T @ pt.split.P @ T.T

    n = pt.n
    traces = np.trace(h, axis1=1, axis2=2) if h.size else np.zeros(0)
    pe2 = P[:, 1]
    c_r = -h[:, 1, 1] if h.size else np.zeros(0)
    residuals = {
        "minimality": float(np.max(np.abs(traces)) / n) if h.size else 0.0,
        "anticommutation": float(np.max(np.abs(h @ P + P @ h))) if h.size else 0.0,
        "xi_column": float(np.max(np.abs(h[:, 1:, 0]))) if h.size else 0.0,
        "principal_curvature": float(
            np.max(np.linalg.norm(h @ pe2 - c_r[:, None] * pe2, axis=1))
        )
        if h.size
        else 0.0,
    }
    max_h = float(np.max(np.abs(pt.h))) if pt.h.size else 0.0
    failed = tuple(k for k in CERTIFICATE_STEPS if residuals[k] > tol)
    if max_h <= tol:
        verdict = "totally_geodesic"
    else:
        verdict = "hypotheses_inconsistent"
        failed = failed or ("final",)
    return CertificateReport(verdict=verdict, residuals=residuals, failed_steps=failed, max_h=max_h)
