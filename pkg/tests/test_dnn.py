import numpy as np
import pytest

from cpsignal import (
    FixedMean,
    JointPmf,
    build_problem,
    solve,
    solve_dnn,
    sym_eig,
)
from cpsignal.dnn import psd_project
from oracles import char_poly_eigenvalues


def test_sym_eig_identity():
    w, E = sym_eig(np.eye(4))
    assert np.allclose(w, 1.0)
    assert np.allclose(E @ E.T, np.eye(4), atol=1e-12)


def test_sym_eig_cost_matrix_golden_ratio():
    # eigenvalues of [[1,-1],[-1,0]] solve l^2 - l - 1 = 0
    V = np.array([[1.0, -1.0], [-1.0, 0.0]])
    w, E = sym_eig(V)
    root = np.sqrt(5.0)
    assert w[0] == pytest.approx((1 - root) / 2, abs=1e-12)
    assert w[1] == pytest.approx((1 + root) / 2, abs=1e-12)
    assert np.max(np.abs((E * w) @ E.T - V)) <= 1e-12


def test_sym_eig_matches_characteristic_polynomial_oracle():
    rng = np.random.default_rng(12)
    for _ in range(20):
        Q = rng.normal(size=(5, 5))
        Q = 0.5 * (Q + Q.T)
        w, E = sym_eig(Q)
        ref = char_poly_eigenvalues(Q)
        assert np.max(np.abs(w - ref)) <= 1e-8
        assert np.all(np.diff(w) >= -1e-12)  # ascending
        assert np.max(np.abs((E * w) @ E.T - Q)) <= 1e-9 * max(1.0, np.linalg.norm(Q))
        assert np.max(np.abs(E.T @ E - np.eye(5))) <= 1e-10


def test_sym_eig_rejects_nonsymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="square"):
        sym_eig(np.ones((2, 3)))


def test_psd_projection_fixes_psd_matrices():
    rng = np.random.default_rng(13)
    A = rng.normal(size=(6, 6))
    P = A @ A.T
    assert np.max(np.abs(psd_project(P) - P)) <= 1e-12 * np.linalg.norm(P)
    # and clamps an indefinite one
    Q = np.diag([1.0, -2.0])
    assert np.allclose(psd_project(Q), np.diag([1.0, 0.0]))


@pytest.mark.parametrize(
    "number,variant,target",
    [
        (1, "deception", 0.96),
        (2, "deception", -0.4715),
        (3, "deception", -0.4283),
    ],
)
def test_dnn_scenarios(number, variant, target):
    from conftest import scenario

    problem = scenario(number, variant)
    sol = solve_dnn(problem, tol=1e-7)
    assert sol.converged
    assert sol.value == pytest.approx(target, abs=1e-3)
    n = problem.n
    assert np.min(sol.Xi) >= -1e-6
    assert np.min(np.linalg.eigvalsh(sol.Xi)) >= -1e-6
    assert np.max(np.abs(sol.Xi @ np.ones(n) - problem.p_o)) <= 1e-6
    assert sol.value == pytest.approx(float(np.sum(problem.Vbar * sol.Xi)), abs=1e-9)


def test_dnn_lower_bounds_polyhedral(scenario2):
    poly = solve(scenario2, tol=1e-3, max_iters=200)
    dnn = solve_dnn(scenario2, tol=1e-8)
    assert dnn.value <= poly.value + 1e-6
    assert abs(dnn.value - poly.value) <= 5e-3  # exact regime: n = 4


def test_dnn_fixed_mean_mode(scenario2):
    mu = scenario2.Z @ scenario2.p_o
    problem = build_problem(scenario2.pmf, "deception", FixedMean(mu))
    sol = solve_dnn(problem, tol=1e-7)
    assert sol.converged
    W = np.vstack([problem.Z, np.ones(problem.n)])
    assert np.max(np.abs(W @ (sol.Xi @ np.ones(problem.n)) - np.r_[mu, 1.0])) <= 1e-6
    # fewer constraints cannot raise the optimum
    full = solve_dnn(scenario2, tol=1e-7)
    assert sol.value <= full.value + 1e-6


def test_dnn_iteration_limit_reports_residuals(scenario3):
    sol = solve_dnn(scenario3, tol=1e-12, max_iters=40)
    assert not sol.converged
    assert sol.iterations == 40
    assert all(np.isfinite(r) for r in sol.residuals)


def test_dnn_rejects_bad_tol(scenario1):
    with pytest.raises(ValueError):
        solve_dnn(scenario1, tol=0.0)


def test_dnn_single_state():
    pmf = JointPmf(1, [[1.0, 2.0]], [1.0])
    problem = build_problem(pmf, "deception")
    sol = solve_dnn(problem, tol=1e-9)
    assert sol.value == pytest.approx(float(problem.Vbar[0, 0]), abs=1e-7)
