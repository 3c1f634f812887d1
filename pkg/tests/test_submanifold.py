import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cosymplectic_bench.ambient import make_standard_structure
from cosymplectic_bench.numerics import make_rng
from cosymplectic_bench.submanifold import (
    InvalidPointError,
    PlaneSection,
    SubmanifoldPoint,
    alpha_beta,
    coordinate_sectional_curvatures,
    h_norm_squared,
    induced_curvature,
    mean_curvature,
    mean_curvature_norm2,
    p_norm_squared,
    phi_split,
    random_point,
    rho,
    rho_identity_residual,
    scalar_curvature,
    scalar_curvature_gauss_form,
    scalar_identity_residual,
    sectional_curvature,
    split_reconstruction_error,
    unitary_rotation,
)


def coordinate_point(m, rows, c=0.0, h=None, geometric_mode=True):
    """Point whose tangent frame is the given ambient coordinate vectors (names like 'x1', 'y2', 'xi')."""
    model = make_standard_structure(m, c)
    eye = np.eye(model.dim)
    idx = {"xi": model.dim - 1}
    idx.update({f"x{i + 1}": i for i in range(m)})
    idx.update({f"y{i + 1}": m + i for i in range(m)})
    tangent = np.array([eye[idx[r]] if isinstance(r, str) else r for r in rows], dtype=float)
    used = [idx[r] for r in rows if isinstance(r, str)]
    if len(used) == len(rows):
        normal = np.delete(eye, used, axis=0)
    else:
        from cosymplectic_bench.numerics import complete_basis

        normal = complete_basis(tangent)[len(rows):]
    d = len(rows)
    h = np.zeros((model.dim - d, d, d)) if h is None else h
    return SubmanifoldPoint(model, tangent, normal, h, geometric_mode)


# -- phi split -------------------------------------------------------------------------------


def test_invariant_split():
    pt = coordinate_point(2, ["xi", "x1", "y1"])
    split = phi_split(pt)
    np.testing.assert_array_equal(split.F, 0)
    np.testing.assert_array_equal(split.P[1:, 1:], [[0, -1], [1, 0]])
    assert p_norm_squared(split) == 2.0


def test_anti_invariant_split():
    pt = coordinate_point(2, ["xi", "x1", "x2"])
    split = phi_split(pt)
    np.testing.assert_array_equal(split.P, 0)
    assert p_norm_squared(split) == 0.0


def test_p_norm_mixed_frame_double_loop():
    s = 1 / np.sqrt(2)
    rows = ["xi", "x1", np.array([0, 0, s, s, 0, 0, 0])]  # (y1 + x2)/sqrt2 in R^7, m = 3
    pt = coordinate_point(3, rows)
    phi = pt.ambient.phi
    want = 0.0
    for i in range(pt.dim):
        for j in range(pt.dim):
            want += float(pt.tangent_frame[i] @ phi @ pt.tangent_frame[j]) ** 2
    assert p_norm_squared(pt.split) == pytest.approx(want, abs=1e-15)
    assert want == pytest.approx(1.0)  # g(x1, phi (y1+x2)/sqrt2)^2 counted twice


@given(st.integers(0, 2**32 - 1))
def test_split_skew_and_reconstruction(seed):
    pt = random_point(seed, 3, 4)
    P = pt.split.P
    assert np.max(np.abs(P + P.T)) < 1e-12
    assert split_reconstruction_error(pt) < 1e-10
    assert 0.0 <= p_norm_squared(pt.split) <= pt.n + 1e-12


@pytest.mark.parametrize("m,n", [(2, 2), (3, 4), (4, 6)])
def test_invariant_random_p_norm_is_n(m, n):
    pt = random_point(3, n, m, kind="invariant")
    assert p_norm_squared(pt.split) == pytest.approx(n, abs=1e-12)


def test_unitary_rotation_commutes_with_phi():
    model = make_standard_structure(3, 0.0)
    U = unitary_rotation(3, make_rng(5))
    np.testing.assert_allclose(U @ model.phi, model.phi @ U, atol=1e-14)
    np.testing.assert_allclose(U @ U.T, np.eye(7), atol=1e-14)
    np.testing.assert_array_equal(U @ model.xi, model.xi)


# -- alpha, beta -------------------------------------------------------------------------------


def test_phi_section_alpha_beta():
    pt = coordinate_point(2, ["xi", "x1", "y1"])
    assert alpha_beta(pt, PlaneSection.coordinate(1, 2, 3)) == pytest.approx((1.0, 0.0))


def test_xi_plane_beta_one():
    pt = random_point(1, 3, 3)
    u = np.eye(4)[0]
    v = np.array([0, 0.6, 0.8, 0])
    assert alpha_beta(pt, PlaneSection(u, v))[1] == pytest.approx(1.0)


@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi))
def test_alpha_beta_rotation_invariant(seed, angle):
    rng = make_rng(seed)
    pt = random_point(rng, 3, 4)
    plane = PlaneSection.spanned_by(*rng.standard_normal((2, 4)))
    a, b = alpha_beta(pt, plane)
    a2, b2 = alpha_beta(pt, plane.rotated(angle))
    assert 0 <= a <= 1 + 1e-12 and 0 <= b <= 1 + 1e-12
    assert abs(a - a2) < 1e-10 and abs(b - b2) < 1e-10


def test_degenerate_plane_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        PlaneSection.spanned_by([1, 0, 0], [1, 1e-9, 0])
    with pytest.raises(ValueError, match="orthonormal"):
        PlaneSection([1, 0, 0], [1, 1, 0])


# -- running instance values ---------------------------------------------------------------------


def test_running_instance_shape(running_instance):
    pt = running_instance
    np.testing.assert_array_equal(pt.h[0], np.diag([1.0, 2.0, 3.0]))
    np.testing.assert_array_equal(pt.h[1], np.diag([1.0, -1.0, 0.0]))


def test_mean_curvature_values(running_instance):
    np.testing.assert_allclose(mean_curvature(running_instance), [2.0, 0.0])
    assert mean_curvature_norm2(running_instance) == 4.0
    assert h_norm_squared(running_instance) == 16.0


def test_running_instance_curvatures(running_instance):
    pt = running_instance
    assert induced_curvature(pt, [1, 0, 0], [0, 1, 0], [0, 1, 0], [1, 0, 0]) == pytest.approx(1.0)
    assert sectional_curvature(pt, PlaneSection.coordinate(0, 1, 3)) == pytest.approx(1.0)
    assert scalar_curvature(pt) == pytest.approx(10.0)
    assert scalar_curvature_gauss_form(pt) == pytest.approx(10.0)
    assert rho(pt) == pytest.approx(2.0)


def test_zero_h_flat():
    pt = coordinate_point(2, ["xi", "x1", "x2"])
    assert scalar_curvature(pt) == 0.0 and rho(pt) == 0.0
    assert mean_curvature_norm2(pt) == 0.0 and h_norm_squared(pt) == 0.0
    rng = np.random.default_rng(0)
    for _ in range(5):
        assert induced_curvature(pt, *rng.standard_normal((4, 3))) == 0.0


def test_zero_h_matches_ambient(rng):
    pt = random_point(9, 3, 3).with_h(np.zeros((3, 4, 4)))
    from cosymplectic_bench.ambient import ambient_curvature

    for _ in range(5):
        X, Y, Z, W = rng.standard_normal((4, 4))
        want = ambient_curvature(pt.ambient, *(pt.lift(a) for a in (X, Y, Z, W)))
        assert induced_curvature(pt, X, Y, Z, W) == pytest.approx(want, abs=1e-12)


def test_sectional_formula_in_frame(rng):
    pt = random_point(4, 3, 4)
    a, b = alpha_beta(pt, PlaneSection.coordinate(0, 1, 4))
    h = pt.h
    want = pt.c / 4 * (1 + 3 * a - b) + np.sum(h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] ** 2)
    assert sectional_curvature(pt, PlaneSection.coordinate(0, 1, 4)) == pytest.approx(want, abs=1e-12)


# -- invariants on random instances --------------------------------------------------------------


@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 3), (3, 4), (4, 4)]), st.booleans())
def test_identities_hold(seed, nm, geometric):
    pt = random_point(seed, *nm, geometric_mode=geometric)
    assert scalar_identity_residual(pt) < 1e-9
    assert rho_identity_residual(pt) < 1e-9


@given(st.integers(0, 2**32 - 1))
def test_tau_from_independent_route(seed):
    pt = random_point(seed, 3, 4, geometric_mode=False)
    e = np.eye(pt.dim)
    tau = sum(induced_curvature(pt, e[i], e[j], e[j], e[i]) for i, j in itertools.combinations(range(pt.dim), 2))
    assert abs(tau - scalar_curvature(pt)) < 1e-10 * (1 + abs(tau))
    K = coordinate_sectional_curvatures(pt)
    assert abs(np.sum(np.triu(K, 1)) - scalar_curvature(pt)) < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_gauss_curvature_symmetries(seed):
    pt = random_point(seed, 3, 3, geometric_mode=False)
    R = pt.curvature_tensor
    assert np.max(np.abs(R + R.transpose(1, 0, 2, 3))) < 1e-10
    assert np.max(np.abs(R + R.transpose(0, 1, 3, 2))) < 1e-10
    assert np.max(np.abs(R - R.transpose(2, 3, 0, 1))) < 1e-10
    bianchi = R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)
    assert np.max(np.abs(bianchi)) < 1e-10


@given(st.integers(0, 2**32 - 1))
def test_xi_planes_flat_in_geometric_mode(seed):
    rng = make_rng(seed)
    pt = random_point(rng, 3, 4)
    w = rng.standard_normal(4)
    assert abs(sectional_curvature(pt, PlaneSection.spanned_by(np.eye(4)[0], w))) < 1e-12


# -- validation ----------------------------------------------------------------------------------


def test_nonsymmetric_h_path():
    pt = random_point(0, 2, 2)
    h = pt.h.copy()
    h[0, 1, 2] += 1.0
    with pytest.raises(InvalidPointError) as exc:
        pt.with_h(h)
    assert exc.value.path == "h[0][1][2]"


def test_xi_not_tangent():
    with pytest.raises(InvalidPointError, match="xi"):
        coordinate_point(2, ["x1", "y1", "x2"])


def test_non_orthonormal_frame():
    pt = random_point(0, 2, 2)
    tangent = pt.tangent_frame.copy()
    tangent[1] *= 1 + 1e-8
    with pytest.raises(InvalidPointError, match="orthonormal"):
        SubmanifoldPoint(pt.ambient, tangent, pt.normal_frame, pt.h)


def test_geometric_mode_rejects_xi_row():
    pt = random_point(0, 2, 2, geometric_mode=False)
    with pytest.raises(InvalidPointError):
        pt.with_h(pt.h, geometric_mode=True)


def test_too_small_dimension():
    with pytest.raises(InvalidPointError):
        coordinate_point(1, ["xi", "x1"])


def test_random_point_deterministic():
    a, b = random_point((7, 3), 3, 4), random_point((7, 3), 3, 4)
    assert a.tangent_frame.tobytes() == b.tangent_frame.tobytes()
    assert a.h.tobytes() == b.h.tobytes() and a.c == b.c
    assert -4 <= a.c <= 4
