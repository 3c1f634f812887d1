"""Small dense linear algebra and seeded randomness.

Everything here works on plain ``numpy`` float arrays.  Randomness always goes
through :func:`make_rng`, which wraps numpy's PCG64 bit generator so that a
given integer seed (or ``(seed, index)`` pair) reproduces the same stream on
any platform.
"""

from __future__ import annotations

import numpy as np

RANK_TOL = 1e-8
ORTHO_TOL = 1e-10
SYMMETRY_TOL = 1e-10


class RankDeficiencyError(ValueError):
    """Raised when a set of vectors is (numerically) linearly dependent."""


def make_rng(seed) -> np.random.Generator:
    """Return a PCG64 generator.

    ``seed`` may be an int, a sequence of ints (e.g. ``(sweep_seed, i)`` for a
    per-instance stream) or an existing generator, which is returned as is.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def gram_schmidt(vectors, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormalize ``vectors`` (rows) with twice-iterated modified Gram-Schmidt.

    The direction of the first vector is preserved.  A vector whose residual
    after projection is shorter than ``tol`` times its original length is
    treated as dependent and raises :class:`RankDeficiencyError`.
    """
    vecs = np.atleast_2d(np.asarray(vectors, dtype=float))
    out = np.empty_like(vecs)
    for k, v in enumerate(vecs):
        norm0 = np.linalg.norm(v)
        if not np.isfinite(norm0) or norm0 == 0.0:
            raise RankDeficiencyError(f"vector {k} is zero or non-finite")
        w = v.copy()
        for _ in range(2):
            for q in out[:k]:
                w -= (q @ w) * q
        norm = np.linalg.norm(w)
        if norm < tol * norm0:
            raise RankDeficiencyError(
                f"vector {k} is dependent on the previous ones "
                f"(residual {norm / norm0:.3e} < tol {tol:.1e})"
            )
        out[k] = w / norm
    return out


def complete_basis(vectors, dim: int | None = None) -> np.ndarray:
    """Extend orthonormal rows ``vectors`` to an orthonormal basis of R^dim.

    The given rows come first, unchanged up to rounding.
    """
    vecs = np.atleast_2d(np.asarray(vectors, dtype=float))
    dim = vecs.shape[1] if dim is None else dim
    if vecs.shape[0] == 0:
        return np.eye(dim)
    q, r = np.linalg.qr(vecs.T, mode="complete")
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q[:, : len(signs)] *= signs
    basis = q.T
    basis[: vecs.shape[0]] = vecs
    return basis


def orthonormality_error(frame) -> float:
    """Max-abs deviation of the Gram matrix of ``frame`` rows from identity."""
    frame = np.atleast_2d(np.asarray(frame, dtype=float))
    gram = frame @ frame.T
    return float(np.max(np.abs(gram - np.eye(len(frame))))) if len(frame) else 0.0


def _off_norm2(a: np.ndarray) -> float:
    return float(np.sum(a**2) - np.sum(np.diag(a) ** 2))


def sym_eigen(a, tol: float = SYMMETRY_TOL, max_sweeps: int = 100):
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
    eigenvectors as the columns of an orthogonal matrix.

    Raises:
        ValueError: if ``a`` is not square or not symmetric within
            ``tol * (1 + max|a|)``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = 1.0 + (np.max(np.abs(a)) if a.size else 0.0)
    if a.size and np.max(np.abs(a - a.T)) > tol * scale:
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    total = float(np.sum(a**2))
    for _ in range(max_sweeps):
        if _off_norm2(a) <= (1e-15) ** 2 * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                diff = a[q, q] - a[p, p]
                if abs(apq) <= 1e-18 * (abs(a[p, p]) + abs(a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                if abs(diff) > 1e100 * abs(apq):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 if theta == 0.0 else np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) Givens rotation
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def seeded_random_orthonormal_frame(dim: int, fixed_first=None, seed=0) -> np.ndarray:
    """Random orthonormal basis of R^dim (rows), reproducible from ``seed``.

    If ``fixed_first`` is given it must be a unit vector and becomes row 0.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = make_rng(seed)
    g = rng.standard_normal((dim, dim))
    if fixed_first is not None:
        first = np.asarray(fixed_first, dtype=float)
        if first.shape != (dim,):
            raise ValueError(f"fixed_first must have shape ({dim},)")
        if abs(np.linalg.norm(first) - 1.0) > ORTHO_TOL:
            raise ValueError("fixed_first must be a unit vector")
        g[0] = first
    # Householder QR: numerically orthonormal, and column k spans the same flag as g[:k+1]
    q, r = np.linalg.qr(g.T)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    frame = (q * signs).T
    if fixed_first is not None:
        frame[0] = first
    return frame


def random_unit_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
