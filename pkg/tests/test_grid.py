import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halm.grid import Boundary, GridShape, div, grad, inner, project_sphere

from oracles import backward_matrices, d1_periodic, forward_matrices

SHAPES = [(4, 4), (5, 7), (8, 8)]
BOUNDARIES = [Boundary.PERIODIC, Boundary.NEUMANN]


def test_grid_shape_rejects_degenerate_sizes():
    with pytest.raises(ValueError):
        GridShape(1, 4)
    with pytest.raises(ValueError):
        GridShape(4, 1)
    assert GridShape(2, 2).size == 4


@pytest.mark.parametrize("bc", BOUNDARIES)
def test_grad_of_constant_is_zero(bc):
    u = np.full((6, 5), 3.7)
    gx, gy = grad(u, bc)
    assert np.all(gx == 0.0) and np.all(gy == 0.0)


@pytest.mark.parametrize("bc", BOUNDARIES)
def test_div_of_constant_vector_field_periodic_only(bc):
    p1 = np.full((6, 5), 1.3)
    p2 = np.full((6, 5), -0.4)
    d = div(p1, p2, bc)
    if bc == Boundary.PERIODIC:
        assert np.allclose(d, 0.0)
    else:
        # Neumann backward differences keep boundary contributions.
        assert np.allclose(d[1:-1, 1:-1], 0.0)


def test_forward_difference_strip_by_hand():
    # D1 applied to [0, 1, 2, 3] wraps at the end: differences [1, 1, 1, -3].
    strip = np.array([0.0, 1.0, 2.0, 3.0])
    assert np.array_equal(d1_periodic(4) @ strip, [1.0, 1.0, 1.0, -3.0])
    # Same numbers along every row of a 2-D field built from that strip.
    u = np.tile(strip, (2, 1))
    gx, _ = grad(u, Boundary.PERIODIC)
    assert np.array_equal(gx, np.tile([1.0, 1.0, 1.0, -3.0], (2, 1)))


@pytest.mark.parametrize("bc", BOUNDARIES)
@pytest.mark.parametrize("shape", SHAPES)
def test_grad_div_match_dense_matrices(shape, bc):
    h, w = shape
    rng = np.random.default_rng(h * 100 + w)
    u = rng.standard_normal((h, w))
    p1 = rng.standard_normal((h, w))
    p2 = rng.standard_normal((h, w))
    dxf, dyf = forward_matrices(h, w, bc)
    dxb, dyb = backward_matrices(h, w, bc)

    gx, gy = grad(u, bc)
    assert np.max(np.abs(gx.ravel() - dxf @ u.ravel())) <= 1e-13
    assert np.max(np.abs(gy.ravel() - dyf @ u.ravel())) <= 1e-13
    d = div(p1, p2, bc)
    assert np.max(np.abs(d.ravel() - (dxb @ p1.ravel() + dyb @ p2.ravel()))) <= 1e-13


@pytest.mark.parametrize("bc", BOUNDARIES)
@pytest.mark.parametrize("shape", SHAPES)
def test_adjointness_identity(shape, bc):
    h, w = shape
    rng = np.random.default_rng(h * 7 + w)
    u = rng.standard_normal((h, w))
    p1 = rng.standard_normal((h, w))
    p2 = rng.standard_normal((h, w))
    gx, gy = grad(u, bc)
    lhs = inner(gx, p1) + inner(gy, p2)
    rhs = -inner(u, div(p1, p2, bc))
    scale = np.linalg.norm(u) * np.sqrt(np.sum(p1**2 + p2**2)) + 1.0
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(
    h=st.integers(2, 9),
    w=st.integers(2, 9),
    seed=st.integers(0, 2**31),
    bc=st.sampled_from(BOUNDARIES),
)
def test_adjointness_property(h, w, seed, bc):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((h, w))
    p1 = rng.standard_normal((h, w))
    p2 = rng.standard_normal((h, w))
    gx, gy = grad(u, bc)
    lhs = inner(gx, p1) + inner(gy, p2)
    rhs = -inner(u, div(p1, p2, bc))
    scale = np.linalg.norm(u) * np.sqrt(np.sum(p1**2 + p2**2)) + 1.0
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_div_grad_is_5pt_laplacian_via_dense_oracle():
    from oracles import laplacian_5pt_periodic

    h, w = 4, 4
    rng = np.random.default_rng(11)
    u = rng.standard_normal((h, w))
    gx, gy = grad(u, Boundary.PERIODIC)
    lap = div(gx, gy, Boundary.PERIODIC)
    dense = laplacian_5pt_periodic(h, w) @ u.ravel()
    assert np.max(np.abs(lap.ravel() - dense)) <= 1e-12


def test_project_sphere_pointwise_values():
    n1, n2 = project_sphere(np.array([[3.0]]), np.array([[4.0]]))
    assert np.allclose([n1[0, 0], n2[0, 0]], [0.6, 0.8])


def test_project_sphere_zero_vector_gets_fallback():
    n1, n2 = project_sphere(np.zeros((2, 2)), np.zeros((2, 2)))
    assert np.all(n1 == 1.0) and np.all(n2 == 0.0)
    m1, m2 = project_sphere(np.zeros((1, 1)), np.zeros((1, 1)), fallback=(0.0, 1.0))
    assert m1[0, 0] == 0.0 and m2[0, 0] == 1.0


def test_project_sphere_idempotent_and_unit():
    rng = np.random.default_rng(3)
    p1 = rng.standard_normal((6, 6))
    p2 = rng.standard_normal((6, 6))
    n1, n2 = project_sphere(p1, p2)
    assert np.max(np.abs(np.hypot(n1, n2) - 1.0)) <= 1e-12
    m1, m2 = project_sphere(n1, n2)
    assert np.max(np.abs(m1 - n1)) <= 1e-15
    assert np.max(np.abs(m2 - n2)) <= 1e-15


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_project_sphere_preserves_direction(seed):
    rng = np.random.default_rng(seed)
    p1 = rng.standard_normal((5, 5))
    p2 = rng.standard_normal((5, 5))
    n1, n2 = project_sphere(p1, p2)
    dots = n1 * p1 + n2 * p2
    nonzero = np.hypot(p1, p2) > 0
    assert np.all(dots[nonzero] >= 0.0)
    assert np.max(np.abs(np.hypot(n1, n2) - 1.0)) <= 1e-12


@pytest.mark.parametrize("bc", BOUNDARIES)
def test_stencils_match_dense_matrices_on_all_small_grids(bc):
    rng = np.random.default_rng(77)
    for h in range(2, 9):
        for w in range(2, 9):
            u = rng.standard_normal((h, w))
            p1 = rng.standard_normal((h, w))
            p2 = rng.standard_normal((h, w))
            dxf, dyf = forward_matrices(h, w, bc)
            dxb, dyb = backward_matrices(h, w, bc)
            gx, gy = grad(u, bc)
            d = div(p1, p2, bc)
            assert np.max(np.abs(gx.ravel() - dxf @ u.ravel())) <= 1e-13
            assert np.max(np.abs(gy.ravel() - dyf @ u.ravel())) <= 1e-13
            assert np.max(np.abs(d.ravel() - (dxb @ p1.ravel() + dyb @ p2.ravel()))) <= 1e-13
