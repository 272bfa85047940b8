import numpy as np
import pytest

from cpsignal import (
    FixedMean,
    JointPmf,
    LpStatus,
    build_inner_lp,
    build_outer_lp,
    build_problem,
    full_signaling_value,
    initial_partition,
    null_signaling_value,
    refine_step,
    solve,
    solve_lp,
    weak_duality_check,
)
from cpsignal.solver import BoundsTrace, constraint_rows, dual_bound
from oracles import random_problem, two_point_posterior_optimum


def test_inner_lp_initial_partition_forces_full_disclosure(scenario2):
    part = initial_partition(4)
    lp = build_inner_lp(part, scenario2)
    sol = solve_lp(lp)
    assert sol.status is LpStatus.OPTIMAL
    assert np.allclose(sol.x, scenario2.p_o, atol=1e-10)
    assert sol.objective == pytest.approx(full_signaling_value(scenario2), abs=1e-10)


def test_inner_lp_scenario1_values(scenario1):
    part = initial_partition(2)
    assert solve_lp(build_inner_lp(part, scenario1)).objective == pytest.approx(1.8)
    # a vertex at the prior lets the inner cone reach the null value
    part._add_vertex(np.array([0.3, 0.7]))
    sol = solve_lp(build_inner_lp(part, scenario1))
    assert sol.objective == pytest.approx(0.96, abs=1e-12)
    assert sol.x[2] == pytest.approx(1.0, abs=1e-12)


def test_outer_lp_scenario1_initial(scenario1):
    part = initial_partition(2)
    lp = build_outer_lp(part, scenario1)
    assert lp.shape == (2, 3)
    sol = solve_lp(lp)
    assert sol.objective == pytest.approx(0.6, abs=1e-12)
    # optimum puts lambda = 0.3 on the cross pair (e1, e2)
    assert sol.x[1] == pytest.approx(0.3, abs=1e-12)


def test_outer_lp_single_state():
    pmf = JointPmf(1, [[1.0, -2.0]], [1.0])
    problem = build_problem(pmf, "deception")
    part = initial_partition(1)
    lp = build_outer_lp(part, problem)
    assert lp.shape == (1, 1)
    sol = solve_lp(lp)
    assert sol.objective == pytest.approx(float(problem.Vbar[0, 0]))
    inner = solve_lp(build_inner_lp(part, problem))
    assert inner.objective == pytest.approx(sol.objective)


def test_outer_lp_lower_bounds_scenario2(scenario2):
    sol = solve_lp(build_outer_lp(initial_partition(4), scenario2))
    assert sol.objective <= -0.4715 + 1e-9


def test_outer_all_pairs_is_looser(scenario1):
    part = initial_partition(2)
    part.bisect(0)
    common = solve_lp(build_outer_lp(part, scenario1)).objective
    loose = solve_lp(build_outer_lp(part, scenario1, all_pairs=True)).objective
    assert loose <= common + 1e-9


@pytest.mark.parametrize(
    "number,variant,target,tol",
    [
        (1, "deception", 0.96, 1e-3),
        (2, "deception", -0.4715, 1e-3),
        (2, "privacy", -20.0 / 21.0, 1e-3),
    ],
)
def test_solve_scenarios(number, variant, target, tol):
    from conftest import scenario

    problem = scenario(number, variant)
    sol = solve(problem, tol=tol, max_iters=300)
    assert sol.converged
    assert sol.gap <= tol
    assert sol.value == pytest.approx(target, abs=tol)


def test_solution_certificates_and_trace(scenario2):
    sol = solve(scenario2, tol=1e-3, max_iters=300, keep_certificates=True)
    sol.trace.assert_monotone(1e-9)
    lows, ups = sol.trace.lower_bounds, sol.trace.upper_bounds
    assert all(l - 1e-9 <= sol.value <= u + 1e-9 for l, u in zip(lows, ups))

    inner = sol.inner_certificate
    W, rhs = constraint_rows(scenario2)
    agg = sum(w * W @ b for b, w in inner.active_vertices)
    assert np.max(np.abs(agg - rhs)) <= 1e-9
    assert all(w >= 0 for _, w in inner.active_vertices)
    assert inner.value == pytest.approx(float(np.sum(scenario2.Vbar * inner.Xi)), abs=1e-9)

    outer = sol.outer_certificate
    assert outer.value == pytest.approx(float(np.sum(scenario2.Vbar * outer.Xi)), abs=1e-9)
    assert outer.value <= inner.value + 1e-9
    assert dual_bound(scenario2, outer) == pytest.approx(outer.value, abs=1e-8)

    # extraction: factor columns reassemble the inner optimizer
    Xi = sol.Xi
    assert np.min(Xi) >= -1e-12
    assert np.max(np.abs(Xi @ np.ones(4) - scenario2.p_o)) <= 1e-7
    corr = scenario2.Z @ Xi @ scenario2.Z.T
    base = np.outer(scenario2.Z @ scenario2.p_o, scenario2.Z @ scenario2.p_o)
    assert np.min(np.linalg.eigvalsh(0.5 * ((corr - base) + (corr - base).T))) >= -1e-7


def test_weak_duality_checks(scenario1):
    part = initial_partition(2)
    lp = build_outer_lp(part, scenario1)
    lp_sol = solve_lp(lp)
    from cpsignal.solver import _outer_certificate

    pairs = [(0, 0), (0, 1), (1, 1)]
    cert = _outer_certificate(part, scenario1, lp_sol, pairs, lp.c)
    assert dual_bound(scenario1, cert) == pytest.approx(0.6, abs=1e-9)
    assert weak_duality_check(scenario1, cert, null_signaling_value(scenario1))
    assert weak_duality_check(scenario1, cert, full_signaling_value(scenario1))
    converged = solve(scenario1, tol=1e-3, max_iters=100, keep_certificates=True)
    assert weak_duality_check(scenario1, converged.outer_certificate,
                              full_signaling_value(scenario1))
    assert not weak_duality_check(scenario1, converged.outer_certificate,
                                  converged.value - 1.0)


def test_refine_step_scenario1_first_iteration(scenario1):
    sol_partial = solve(scenario1, tol=1e-12, max_iters=1, keep_certificates=True,
                        keep_partition=True)
    part = sol_partial.partition
    refine_step(part, sol_partial.inner_certificate, sol_partial.outer_certificate)
    assert part.vertex_count == 3
    assert np.allclose(part.vertex(2), [0.5, 0.5])
    assert len(part.simplices) == 2


def test_refine_step_diagonal_only_bisects_max_diameter():
    # privacy scenario 1: the initial outer optimum uses only diagonal pairs
    from conftest import scenario

    problem = scenario(1, "privacy")
    sol = solve(problem, tol=1e-9, max_iters=1, keep_certificates=True,
                keep_partition=True)
    assert all(i == j for i, j in sol.outer_certificate.pair_ids)
    part = sol.partition
    before = len(part.simplices)
    refine_step(part, sol.inner_certificate, sol.outer_certificate)
    assert len(part.simplices) == before + 1  # max-diameter fallback fired


def test_solve_n1_closed_form():
    pmf = JointPmf(1, [[1.0, -2.0]], [1.0])
    problem = build_problem(pmf, "deception")
    sol = solve(problem, tol=1e-9)
    assert sol.converged and sol.iterations == 1
    assert sol.value == pytest.approx(float(problem.Vbar[0, 0]))
    assert sol.gap == 0.0
    assert len(sol.factor_columns) == 1
    # fixed-mean variant must agree when the mean matches the state
    fm = build_problem(pmf, "deception", FixedMean(np.array([1.0, -2.0])))
    assert solve(fm, tol=1e-9).value == pytest.approx(sol.value)
    bad = build_problem(pmf, "deception", FixedMean(np.array([0.0, 0.0])))
    with pytest.raises(ValueError, match="infeasible"):
        solve(bad, tol=1e-9)


def test_fixed_mean_relaxation_dominates(scenario2):
    full = solve(scenario2, tol=1e-4, max_iters=300)
    relaxed_problem = build_problem(
        scenario2.pmf, "deception", FixedMean(scenario2.Z @ scenario2.p_o)
    )
    relaxed = solve(relaxed_problem, tol=1e-4, max_iters=300)
    assert relaxed.value <= full.value + 1e-7


def test_fixed_mean_constant_y_is_rank_deficient_but_solvable():
    # y identically -1 makes [Z; 1'] rank deficient; duals must still certify
    pmf = JointPmf(1, [[-1.0, -1.0], [1.0, -1.0]], [0.3, 0.7])
    problem = build_problem(pmf, "deception", FixedMean(np.array([0.4, -1.0])))
    sol = solve(problem, tol=1e-3, max_iters=100, keep_certificates=True)
    assert sol.converged
    _, rhs = constraint_rows(problem)
    assert float(rhs @ sol.dual_y) == pytest.approx(
        sol.value - sol.gap, abs=1e-8
    )


def test_two_point_oracle_scenario1(scenario1):
    ref = two_point_posterior_optimum(scenario1)
    assert ref == pytest.approx(0.96, abs=1e-6)
    sol = solve(scenario1, tol=1e-4, max_iters=200)
    assert sol.value == pytest.approx(ref, abs=1e-3)


def test_two_point_oracle_random_n2():
    rng = np.random.default_rng(21)
    for _ in range(5):
        states = rng.normal(size=(2, 2)).round(2)
        while np.max(np.abs(states[0] - states[1])) < 1e-6:
            states = rng.normal(size=(2, 2)).round(2)
        probs = rng.dirichlet([2.0, 2.0])
        probs = np.maximum(probs, 1e-3)
        probs /= probs.sum()
        problem = build_problem(JointPmf(1, states, probs), "deception")
        ref = two_point_posterior_optimum(problem)
        sol = solve(problem, tol=1e-4, max_iters=200)
        assert sol.value == pytest.approx(ref, abs=2e-3)


def test_random_instances_sandwich_and_duality():
    rng = np.random.default_rng(30)
    for _ in range(12):
        problem = random_problem(rng)
        sol = solve(problem, tol=1e-3, max_iters=100, keep_certificates=True)
        sol.trace.assert_monotone(1e-9)
        assert dual_bound(problem, sol.outer_certificate) <= (
            full_signaling_value(problem) + 1e-8
        )


def test_bounds_trace_csv(tmp_path):
    trace = BoundsTrace()
    trace.append(0, -1.0, 2.0, 4, 1, 0.001234567890123)
    trace.append(1, -0.5, 1.5, 5, 2, 0.1)
    path = tmp_path / "trace.csv"
    trace.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "iter,lower,upper,vertices,simplices,seconds"
    assert lines[1].startswith("0,-1,2,4,1,")
    fields = lines[1].split(",")
    assert float(fields[5]) == pytest.approx(0.001234567890123, rel=1e-11)


def test_solve_rejects_bad_arguments(scenario1):
    with pytest.raises(ValueError):
        solve(scenario1, tol=0.0)
    with pytest.raises(ValueError):
        solve(scenario1, tol=1e-3, max_iters=0)


def test_build_lp_dimension_mismatch(scenario2):
    with pytest.raises(ValueError, match="dimension"):
        build_inner_lp(initial_partition(3), scenario2)
    with pytest.raises(ValueError, match="dimension"):
        build_outer_lp(initial_partition(3), scenario2)
