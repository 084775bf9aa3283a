import numpy as np
import pytest

from halm.grid import Boundary, GridShape
from halm.linsolve import ScreenedPoissonSystem, apply_screened, solve_cg, solve_fft

from oracles import screened_matrix


def _system(h, w, alpha, bc=Boundary.PERIODIC, seed=0):
    rng = np.random.default_rng(seed)
    rhs = rng.standard_normal((h, w))
    return ScreenedPoissonSystem(GridShape(h, w, bc), alpha, rhs)


def test_constant_rhs_gives_constant_solution():
    rhs = np.full((8, 8), 2.5)
    u = solve_fft(ScreenedPoissonSystem(GridShape(8, 8), 3.0, rhs))
    assert np.max(np.abs(u - 2.5)) <= 1e-12


@pytest.mark.parametrize("alpha", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("shape", [(8, 8), (5, 7)])
def test_fft_matches_dense_direct_solve(shape, alpha):
    h, w = shape
    sys = _system(h, w, alpha, seed=h + w)
    dense = screened_matrix(h, w, alpha, Boundary.PERIODIC)
    expected = np.linalg.solve(dense, sys.rhs.ravel()).reshape(h, w)
    u = solve_fft(sys)
    assert np.max(np.abs(u - expected)) <= 1e-10
    # residual contract
    resid = np.linalg.norm(apply_screened(u, alpha, Boundary.PERIODIC) - sys.rhs)
    assert resid <= 1e-10 * np.linalg.norm(sys.rhs)


def test_alpha_zero_is_identity():
    sys = _system(6, 6, 0.0, seed=4)
    assert np.array_equal(solve_fft(sys), sys.rhs)


def test_fft_rejects_neumann():
    sys = _system(4, 4, 1.0, bc=Boundary.NEUMANN)
    with pytest.raises(ValueError):
        solve_fft(sys)


def test_negative_alpha_rejected():
    with pytest.raises(ValueError):
        ScreenedPoissonSystem(GridShape(4, 4), -1.0, np.zeros((4, 4)))


def test_cg_agrees_with_fft_on_periodic():
    sys = _system(8, 8, 1.0, seed=9)
    res = solve_cg(sys, tol=1e-12)
    assert res.converged
    assert np.max(np.abs(res.u - solve_fft(sys))) <= 1e-9


@pytest.mark.parametrize("bc", [Boundary.PERIODIC, Boundary.NEUMANN])
def test_cg_residual_contract(bc):
    sys = _system(8, 8, 2.0, bc=bc, seed=13)
    res = solve_cg(sys, tol=1e-10)
    resid = np.linalg.norm(apply_screened(res.u, 2.0, bc) - sys.rhs)
    assert resid <= 1e-10 * np.linalg.norm(sys.rhs)
    assert res.converged
    assert res.rel_residual <= 1e-10
    assert len(res.residuals) == res.n_iter


def test_cg_zero_rhs_returns_zero_immediately():
    sys = ScreenedPoissonSystem(GridShape(5, 5), 1.0, np.zeros((5, 5)))
    res = solve_cg(sys)
    assert res.n_iter <= 1
    assert np.all(res.u == 0.0)
    assert res.converged


def test_cg_reports_non_convergence_but_returns_iterate():
    sys = _system(8, 8, 50.0, bc=Boundary.NEUMANN, seed=2)
    res = solve_cg(sys, tol=1e-14, max_iter=2)
    assert not res.converged
    assert res.n_iter == 2
    assert np.all(np.isfinite(res.u))


@pytest.mark.parametrize("bc", [Boundary.PERIODIC, Boundary.NEUMANN])
def test_operator_is_spd(bc):
    rng = np.random.default_rng(21)
    for _ in range(20):
        v = rng.standard_normal((6, 7))
        quad = float(np.sum(v * apply_screened(v, 1.5, bc)))
        assert quad >= np.sum(v * v) - 1e-12


def test_cg_error_decreases_monotonically_in_a_norm():
    h, w, alpha = 8, 8, 3.0
    bc = Boundary.NEUMANN
    sys = _system(h, w, alpha, bc=bc, seed=31)
    dense = screened_matrix(h, w, alpha, bc)
    exact = np.linalg.solve(dense, sys.rhs.ravel())
    iterates = []
    solve_cg(sys, tol=1e-12, callback=lambda x: iterates.append(x.ravel()))
    errs = [float((exact - x) @ dense @ (exact - x)) for x in iterates]
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("alpha", [0.1, 1.0, 10.0])
def test_fft_matches_dense_on_all_small_grids(alpha):
    rng = np.random.default_rng(55)
    for h in range(2, 9):
        for w in range(2, 9):
            rhs = rng.standard_normal((h, w))
            sys = ScreenedPoissonSystem(GridShape(h, w), alpha, rhs)
            dense = screened_matrix(h, w, alpha, Boundary.PERIODIC)
            expected = np.linalg.solve(dense, rhs.ravel()).reshape(h, w)
            assert np.max(np.abs(solve_fft(sys) - expected)) <= 1e-10


def test_cg_and_fft_agree_on_random_periodic_systems():
    from hypothesis import given, settings
    from hypothesis import strategies as st

    @settings(max_examples=25, deadline=None)
    @given(h=st.integers(2, 10), w=st.integers(2, 10),
           seed=st.integers(0, 2**31), alpha=st.floats(0.05, 20.0))
    def check(h, w, seed, alpha):
        rng = np.random.default_rng(seed)
        sys = ScreenedPoissonSystem(GridShape(h, w), alpha, rng.standard_normal((h, w)))
        res = solve_cg(sys, tol=1e-12)
        assert np.max(np.abs(res.u - solve_fft(sys))) <= 1e-8

    check()
