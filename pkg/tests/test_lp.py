import numpy as np
import pytest

from cpsignal import LpProblem, LpStatus, solve_lp
from oracles import enumerate_lp_optimum


def test_simple_optimum():
    sol = solve_lp(LpProblem(c=[-1.0, 0.0], A=[[1.0, 1.0]], b=[1.0]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective == pytest.approx(-1.0, abs=1e-12)
    assert np.allclose(sol.x, [1.0, 0.0])


def test_infeasible():
    sol = solve_lp(LpProblem(c=[1.0], A=[[1.0]], b=[-1.0]))
    assert sol.status is LpStatus.INFEASIBLE
    assert sol.x is None


def test_unbounded():
    # x - y = 0 with objective -x: the ray x = y -> infinity
    sol = solve_lp(LpProblem(c=[-1.0, 0.0], A=[[1.0, -1.0]], b=[0.0]))
    assert sol.status is LpStatus.UNBOUNDED


def test_validation():
    with pytest.raises(ValueError, match="zero row"):
        LpProblem(c=[1.0, 1.0], A=[[0.0, 0.0]], b=[1.0])
    with pytest.raises(ValueError, match="shape"):
        LpProblem(c=[1.0], A=[[1.0, 2.0]], b=[1.0])
    with pytest.raises(ValueError, match="finite"):
        LpProblem(c=[np.nan, 1.0], A=[[1.0, 2.0]], b=[1.0])


def _random_feasible(rng, m, n):
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0.5, 1.5, size=n)
    b = A @ x0
    # bounded objective: nonnegative part plus a row combination
    c = rng.uniform(0.0, 1.0, size=n) + A.T @ rng.normal(size=m)
    return LpProblem(c=c, A=A, b=b)


def test_matches_enumeration_oracle():
    rng = np.random.default_rng(7)
    for _ in range(60):
        p = _random_feasible(rng, 3, 6)
        sol = solve_lp(p)
        assert sol.status is LpStatus.OPTIMAL
        ref, _ = enumerate_lp_optimum(p.c, p.A, p.b)
        assert sol.objective == pytest.approx(ref, abs=1e-8)


def test_optimal_invariants():
    rng = np.random.default_rng(11)
    for _ in range(40):
        p = _random_feasible(rng, int(rng.integers(1, 5)), int(rng.integers(2, 9)))
        sol = solve_lp(p)
        assert sol.status is LpStatus.OPTIMAL
        x, y = sol.x, sol.y
        assert np.max(np.abs(p.A @ x - p.b)) <= 1e-9
        assert np.min(x) >= -1e-12
        # dual feasibility and strong duality
        assert np.all(p.A.T @ y <= p.c + 1e-8)
        assert abs(p.c @ x - p.b @ y) <= 1e-8 * (1 + abs(sol.objective))
        # complementary slackness
        assert abs(float(x @ (p.c - p.A.T @ y))) <= 1e-8


def test_scaling_by_ten():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = _random_feasible(rng, 3, 7)
        s1 = solve_lp(p)
        s2 = solve_lp(LpProblem(c=10.0 * p.c, A=p.A, b=p.b))
        assert s2.objective == pytest.approx(10.0 * s1.objective, rel=1e-9, abs=1e-12)
        basis1 = set(np.nonzero(s1.x > 1e-9)[0])
        basis2 = set(np.nonzero(s2.x > 1e-9)[0])
        assert basis1 == basis2


def test_idempotent_to_the_last_bit():
    rng = np.random.default_rng(5)
    p = _random_feasible(rng, 4, 9)
    s1 = solve_lp(p)
    s2 = solve_lp(p)
    assert s1.status is s2.status
    assert s1.objective == s2.objective
    assert np.array_equal(s1.x, s2.x)
    assert np.array_equal(s1.y, s2.y)


def test_degenerate_problem_terminates():
    # many ties in the ratio test; Bland's rule must prevent cycling
    n = 12
    A = np.vstack([np.ones(n), np.arange(n, dtype=float) + 1.0])
    b = np.array([1.0, 1.0])
    c = -np.ones(n)
    sol = solve_lp(LpProblem(c=c, A=A, b=b))
    assert sol.status is LpStatus.OPTIMAL
