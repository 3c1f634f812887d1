import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosymplectic_bench.delta import (
    curvature_operator_bound,
    curvature_operator_matrix,
    delta_invariant,
    inf_sectional_bruteforce,
    inf_sectional_optimize,
    plane_grid,
    refine,
    sectional_batch,
    wedge,
)
from cosymplectic_bench.numerics import make_rng
from cosymplectic_bench.submanifold import PlaneSection, random_point, scalar_curvature, sectional_curvature

from test_submanifold import coordinate_point


def sphere_line(r, m=2):
    """S^2(r) x R: xi, x1, x2 tangent; sphere normal along y1."""
    h = np.zeros((2 * m - 2, 3, 3))
    h[0] = np.diag([0.0, 1 / r, 1 / r])
    return coordinate_point(m, ["xi", "x1", "x2"], h=h)


def torus_line(r1, r2):
    h = np.zeros((2, 3, 3))
    h[0, 1, 1] = 1 / r1
    h[1, 2, 2] = 1 / r2
    return coordinate_point(2, ["xi", "x1", "x2"], h=h)


def test_quadratic_form_matches_tensor(rng):
    pt = random_point(2, 4, 4, geometric_mode=False)
    Q = curvature_operator_matrix(pt)
    u, v = rng.standard_normal((2, pt.dim))
    plane = PlaneSection.spanned_by(u, v)
    k = sectional_batch(Q, plane.u[None], plane.v[None])[0]
    assert k == pytest.approx(sectional_curvature(pt, plane), abs=1e-12)
    b = wedge(plane.u[None], plane.v[None])[0]
    assert b @ b == pytest.approx(1.0)


@pytest.mark.parametrize("dim,res", [(3, 4), (3, 10), (4, 6), (5, 5)])
def test_plane_grid_orthonormal(dim, res):
    U, V = plane_grid(dim, res)
    np.testing.assert_allclose(np.sum(U * U, 1), 1, atol=1e-12)
    np.testing.assert_allclose(np.sum(V * V, 1), 1, atol=1e-12)
    assert np.max(np.abs(np.sum(U * V, 1))) < 1e-12
    # coordinate planes first
    assert np.array_equal(U[0], np.eye(dim)[0]) and np.array_equal(V[0], np.eye(dim)[1])


def test_plane_grid_resolution_check():
    with pytest.raises(ValueError):
        plane_grid(3, 3)


def test_bruteforce_flat_zero():
    pt = coordinate_point(2, ["xi", "x1", "x2"])
    assert inf_sectional_bruteforce(pt, 8)[0] == 0.0


@pytest.mark.parametrize("r", [1.0, 2.0])
def test_sphere_line(r):
    pt = sphere_line(r)
    value, plane = inf_sectional_bruteforce(pt, 16)
    assert value == pytest.approx(0.0, abs=1e-15)
    assert plane.u[0] ** 2 + plane.v[0] ** 2 == pytest.approx(1.0)  # contains xi
    search = inf_sectional_optimize(pt, restarts=8)
    assert abs(search.value) < 1e-9
    res = delta_invariant(pt)
    assert res.delta == pytest.approx(1 / r**2, abs=1e-12)
    assert res.tau == pytest.approx(1 / r**2)


def test_torus_line_flat():
    res = delta_invariant(torus_line(1.0, 2.0))
    assert res.delta == pytest.approx(0.0, abs=1e-12)
    assert res.tau == pytest.approx(0.0, abs=1e-15)


def test_totally_geodesic_flat():
    res = delta_invariant(coordinate_point(3, ["xi", "x1", "x2", "x3"]))
    assert res.delta == 0.0 and res.eigen_lower_bound == pytest.approx(0.0, abs=1e-15)


def test_running_instance_grid(running_instance):
    value, _ = inf_sectional_bruteforce(running_instance, 8)
    assert value <= 1.0


def test_constant_curvature_optimizer_matches_grid():
    pt = coordinate_point(2, ["xi", "x1", "y1"], c=4.0)
    grid, _ = inf_sectional_bruteforce(pt, 48)
    search = inf_sectional_optimize(pt, restarts=16)
    assert abs(search.value - grid) <= 1e-9
    bound = curvature_operator_bound(pt)
    assert bound <= 0.0 and bound <= search.value + 1e-9


def test_eigen_bound_exact_in_dim3(rng):
    for seed in range(20):
        pt = random_point(seed, 2, 3, geometric_mode=False)
        assert inf_sectional_optimize(pt, restarts=8).value == pytest.approx(curvature_operator_bound(pt), abs=1e-9)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 3), (3, 4), (4, 4)]), st.booleans())
def test_result_invariants(seed, nm, geometric):
    rng = make_rng(seed)
    pt = random_point(rng, *nm, geometric_mode=geometric)
    res = delta_invariant(pt, restarts=8, grid_resolution=8, max_iters=200)
    assert res.eigen_lower_bound <= res.inf_k + 1e-9
    assert abs(res.delta - (scalar_curvature(pt) - res.inf_k)) <= 1e-12
    assert res.inf_k <= inf_sectional_bruteforce(pt, 8)[0]
    assert sectional_curvature(pt, res.minimizing_plane) == pytest.approx(res.inf_k, abs=1e-10)
    tau = scalar_curvature(pt)
    for _ in range(100):
        plane = PlaneSection.spanned_by(*rng.standard_normal((2, pt.dim)))
        assert res.delta >= tau - sectional_curvature(pt, plane) - 1e-9


def test_deterministic_plane():
    pt = random_point(5, 4, 4)
    a = delta_invariant(pt, restarts=8, seed=3)
    b = delta_invariant(pt, restarts=8, seed=3)
    assert a.inf_k == b.inf_k
    assert np.array_equal(a.minimizing_plane.u, b.minimizing_plane.u)


def test_refine_never_increases(rng):
    pt = random_point(6, 3, 4)
    plane = PlaneSection.spanned_by(*rng.standard_normal((2, 4)))
    start = sectional_curvature(pt, plane)
    out = refine(pt, plane)
    assert out.value <= start + 1e-12
    assert out.converged


def test_restarts_validated():
    with pytest.raises(ValueError):
        inf_sectional_optimize(random_point(0, 2, 2), restarts=0)
