"""Converging bounds on the completely positive signaling program.

The optimum min tr(Vbar Xi) over completely positive Xi with Xi 1 = p_o is
sandwiched between two polyhedral LPs built from a simplicial partition of
the unit simplex:

* inner cone (upper bound): Xi = sum_b lambda_b b b' over pool vertices b,
  one LP variable per vertex, cost b'Vbar b;
* outer cone (lower bound): Xi = sum lambda_{b,c} (bc' + cb') over vertex
  pairs {b, c} of a common simplex, cost 2 b'Vbar c.

Refinement splits the carrier simplices of the outer solution's active
cross pairs at the pair's own edge (the midpoint is the rank-one direction
the pair stands in for), with a periodic max-diameter bisection that
guarantees diameters shrink to zero, hence convergence of both bounds. By
default outer pairs are restricted to a common simplex, which keeps the
outer cone a superset of the completely positive cone while shrinking
monotonically under refinement; ``all_pairs=True`` builds the looser
variant over the whole vertex pool instead (its bound degrades as vertices
accumulate, so it is for comparison only).
"""

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lp import LpProblem, LpStatus, solve_lp
from .model import SignalingProblem
from .partition import SimplicialPartition, initial_partition

ACTIVE_TOL = 1e-14  # LP weights below this are treated as zero


@dataclass(frozen=True)
class InnerCertificate:
    """Feasible point of the inner cone: Xi = sum lambda_b b b'."""

    active_vertices: list[tuple[np.ndarray, float]]
    Xi: np.ndarray
    value: float


@dataclass(frozen=True)
class OuterCertificate:
    """Relaxation optimum over pair generators, with its LP dual vector."""

    active_pairs: list[tuple[tuple[np.ndarray, np.ndarray], float]]
    Xi: np.ndarray
    value: float
    dual_y: np.ndarray
    # parallel arrays describing every active pair, used by refinement
    pair_ids: list[tuple[int, int]] = field(default_factory=list)
    pair_costs: list[float] = field(default_factory=list)


@dataclass
class BoundsTrace:
    """Per-iteration (index, lower, upper, vertices, simplices, seconds)."""

    rows: list[tuple[int, float, float, int, int, float]] = field(default_factory=list)

    def append(self, it, lower, upper, vertices, simplices, seconds):
        self.rows.append((int(it), float(lower), float(upper), int(vertices), int(simplices), float(seconds)))

    @property
    def lower_bounds(self):
        return [r[1] for r in self.rows]

    @property
    def upper_bounds(self):
        return [r[2] for r in self.rows]

    def write_csv(self, path: str | Path) -> None:
        lines = ["iter,lower,upper,vertices,simplices,seconds"]
        for it, lo, up, nv, ns, sec in self.rows:
            lines.append(f"{it},{lo:.12g},{up:.12g},{nv},{ns},{sec:.12g}")
        Path(path).write_text("\n".join(lines) + "\n")

    def assert_monotone(self, tol: float = 1e-9) -> None:
        lows, ups = self.lower_bounds, self.upper_bounds
        for k in range(len(self.rows)):
            assert lows[k] <= ups[k] + tol, f"row {k}: lower exceeds upper"
            if k:
                assert lows[k] >= lows[k - 1] - tol, f"row {k}: lower bound decreased"
                assert ups[k] <= ups[k - 1] + tol, f"row {k}: upper bound increased"


@dataclass(frozen=True)
class CpSolution:
    """Converged (or best-so-far) solution of the cone program."""

    value: float
    factor_columns: list[np.ndarray]
    gap: float
    trace: BoundsTrace
    dual_y: np.ndarray
    converged: bool
    iterations: int
    inner_certificate: InnerCertificate | None = None
    outer_certificate: OuterCertificate | None = None
    partition: SimplicialPartition | None = None

    @property
    def Xi(self) -> np.ndarray:
        n = self.factor_columns[0].shape[0]
        Xi = np.zeros((n, n))
        for b in self.factor_columns:
            Xi += np.outer(b, b)
        return Xi


def constraint_rows(problem: SignalingProblem) -> tuple[np.ndarray, np.ndarray]:
    """Constraint map (W, rhs) with structurally zero rows removed."""
    W, rhs = problem.constraint_operator()
    keep = np.max(np.abs(W), axis=1) > 0.0
    if not np.all(keep):
        bad = rhs[~keep]
        if np.max(np.abs(bad)) > 1e-12:
            raise ValueError("constraint mode fixes an identically-zero component to a nonzero value")
        W, rhs = W[keep], rhs[keep]
    return W, rhs


def _vertex_costs(Vbar: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return np.sum(cols * (Vbar @ cols), axis=0)


def build_inner_lp(partition: SimplicialPartition, problem: SignalingProblem) -> LpProblem:
    """One variable per pool vertex b, cost b'Vbar b, constraints W(sum b) = rhs."""
    if partition.n != problem.n:
        raise ValueError("partition dimension does not match the problem")
    W, rhs = constraint_rows(problem)
    pool = partition.vertex_matrix()
    return LpProblem(_vertex_costs(problem.Vbar, pool), W @ pool, rhs)


def _common_simplex_pairs(partition: SimplicialPartition) -> list[tuple[int, int]]:
    seen = set()
    for vids in partition.simplices.values():
        svids = sorted(vids)
        for ia in range(len(svids)):
            for ib in range(ia, len(svids)):
                seen.add((svids[ia], svids[ib]))
    return sorted(seen)


def build_outer_lp(
    partition: SimplicialPartition,
    problem: SignalingProblem,
    all_pairs: bool = False,
) -> LpProblem:
    """One variable per unordered vertex pair; common-simplex pairs by default."""
    if partition.n != problem.n:
        raise ValueError("partition dimension does not match the problem")
    W, rhs = constraint_rows(problem)
    pool = partition.vertex_matrix()
    if all_pairs:
        P = pool.shape[1]
        pairs = [(a, b) for a in range(P) for b in range(a, P)]
    else:
        pairs = _common_simplex_pairs(partition)
    I = np.array([p[0] for p in pairs])
    J = np.array([p[1] for p in pairs])
    U = problem.Vbar @ pool
    cost = 2.0 * np.sum(U[:, I] * pool[:, J], axis=0)
    Wpool = W @ pool
    cols = Wpool[:, I] + Wpool[:, J]
    return LpProblem(cost, cols, rhs)


class _OuterAssembler:
    """Incremental common-simplex pair data with per-pair reference counts.

    Adjacent simplices share pairs; refcounting keeps exactly one LP column
    per alive pair and drops pairs whose every carrier simplex died.
    """

    def __init__(self, problem: SignalingProblem, W: np.ndarray):
        self.problem = problem
        self.W = W
        self.refs: dict[tuple[int, int], int] = {}
        self.block_pairs: dict[int, list[tuple[int, int]]] = {}

    def assemble(self, partition: SimplicialPartition):
        alive = set(partition.simplices)
        for sid in list(self.block_pairs):
            if sid not in alive:
                for key in self.block_pairs.pop(sid):
                    self.refs[key] -= 1
                    if self.refs[key] == 0:
                        del self.refs[key]
        for sid, vids in partition.simplices.items():
            if sid not in self.block_pairs:
                svids = sorted(vids)
                block = [
                    (svids[ia], svids[ib])
                    for ia in range(len(svids))
                    for ib in range(ia, len(svids))
                ]
                self.block_pairs[sid] = block
                for key in block:
                    self.refs[key] = self.refs.get(key, 0) + 1
        pairs = sorted(self.refs)
        pool = partition.vertex_matrix()
        I = np.array([p[0] for p in pairs])
        J = np.array([p[1] for p in pairs])
        U = self.problem.Vbar @ pool
        costs = 2.0 * np.sum(U[:, I] * pool[:, J], axis=0)
        Wpool = self.W @ pool
        cols = Wpool[:, I] + Wpool[:, J]
        return costs, cols, pairs


def _inner_certificate(partition, problem, sol) -> InnerCertificate:
    pool = partition.vertex_matrix()
    lam = sol.x
    active = [(pool[:, j].copy(), float(lam[j])) for j in np.nonzero(lam > ACTIVE_TOL)[0]]
    n = problem.n
    Xi = np.zeros((n, n))
    for b, w in active:
        Xi += w * np.outer(b, b)
    return InnerCertificate(active, Xi, float(sol.objective))


def _outer_certificate(partition, problem, sol, ids, costs) -> OuterCertificate:
    lam = sol.x
    n = problem.n
    Xi = np.zeros((n, n))
    active = []
    act_ids, act_costs = [], []
    for j in np.nonzero(lam > ACTIVE_TOL)[0]:
        i1, i2 = ids[j]
        b = partition.vertex(i1)
        c = partition.vertex(i2)
        w = float(lam[j])
        Xi += w * (np.outer(b, c) + np.outer(c, b))
        active.append(((b.copy(), c.copy()), w))
        act_ids.append((i1, i2))
        act_costs.append(0.5 * float(costs[j]))  # b'Vbar c
    return OuterCertificate(active, Xi, float(sol.objective), sol.y.copy(),
                            act_ids, act_costs)


def refine_step(
    partition: SimplicialPartition,
    inner_cert: InnerCertificate,
    outer_cert: OuterCertificate,
    force_uniform: bool = False,
) -> SimplicialPartition:
    """Adaptive bisection driven by the outer solution's active cross pairs.

    Every active pair with b != c marks a place where the outer cone uses a
    rank-two generator the completely positive cone cannot match; splitting
    the carrier simplices at that pair's own edge both removes the generator
    and hands the inner cone the midpoint (b+c)/2, the rank-one surrogate
    the pair was standing in for. Pairs are processed in decreasing
    |lambda * b'Vbar c|. When ``force_uniform`` is set (every 5th iteration
    of the solve loop) the max-diameter simplex is additionally bisected at
    its longest edge, which keeps diameters shrinking everywhere and with
    them the asymptotic convergence guarantee. With no active cross pair the
    max-diameter simplex is bisected instead.
    """
    if partition.n < 2:
        return partition
    scored: dict[tuple[int, int], float] = {}
    for (i1, i2), ((_b, _c), w), cost in zip(
        outer_cert.pair_ids, outer_cert.active_pairs, outer_cert.pair_costs, strict=True
    ):
        if i1 == i2:
            continue
        key = (i1, i2) if i1 < i2 else (i2, i1)
        scored[key] = max(scored.get(key, 0.0), abs(w * cost))
    targets = sorted(scored, key=lambda k: (-scored[k], k))
    split_any = False
    for i1, i2 in targets:
        for sid in partition.simplices_containing(i1, i2):
            partition.bisect(sid, edge=(i1, i2))
            split_any = True
    if force_uniform or not split_any:
        partition.bisect(partition.max_diameter_simplex())
    return partition


def weak_duality_check(
    problem: SignalingProblem,
    outer_cert: OuterCertificate,
    any_feasible_value: float,
    tol: float = 1e-8,
) -> bool:
    """True iff the dual bound rhs'y does not exceed a feasible value."""
    _W, rhs = constraint_rows(problem)
    return float(rhs @ outer_cert.dual_y) <= any_feasible_value + tol


def dual_bound(problem: SignalingProblem, outer_cert: OuterCertificate) -> float:
    _W, rhs = constraint_rows(problem)
    return float(rhs @ outer_cert.dual_y)


def _solve_n1(problem: SignalingProblem, t0: float, keep_certificates: bool,
              keep_partition: bool) -> CpSolution:
    # single state: the only feasible mass matrix is Xi = [[1]]
    W, rhs = constraint_rows(problem)
    if np.max(np.abs(W[:, 0] - rhs)) > 1e-9:
        raise ValueError("constraint mode is infeasible for the single-state problem")
    value = float(problem.Vbar[0, 0])
    w = W[:, 0]
    y = value * w / float(w @ w)
    trace = BoundsTrace()
    trace.append(0, value, value, 1, 1, time.perf_counter() - t0)
    one = np.array([1.0])
    Xi = np.array([[1.0]])
    inner = InnerCertificate([(one, 1.0)], Xi, value)
    outer = OuterCertificate([((one, one), 0.5)], Xi, value, y, [(0, 0)],
                             [value])
    return CpSolution(value, [one], 0.0, trace, y, True, 1,
                      inner_certificate=inner if keep_certificates else None,
                      outer_certificate=outer if keep_certificates else None,
                      partition=initial_partition(1) if keep_partition else None)


def solve(
    problem: SignalingProblem,
    tol: float = 1e-3,
    max_iters: int = 500,
    all_pairs: bool = False,
    keep_certificates: bool = False,
    keep_partition: bool = False,
) -> CpSolution:
    """Run the bounding loop until the gap closes or the iteration cap hits.

    Returns the final inner (achievable) value together with its rank-one
    factorization, the outer dual vector, and the full bounds trace. A run
    that hits ``max_iters`` is returned with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    t0 = time.perf_counter()
    if problem.n == 1:
        return _solve_n1(problem, t0, keep_certificates, keep_partition)

    W, rhs = constraint_rows(problem)
    partition = initial_partition(problem.n)
    outer_data = _OuterAssembler(problem, W)
    trace = BoundsTrace()
    converged = False
    inner_cert = outer_cert = None
    iterations = 0

    for it in range(max_iters):
        iterations = it + 1
        pool = partition.vertex_matrix()
        inner_sol = solve_lp(LpProblem(_vertex_costs(problem.Vbar, pool), W @ pool, rhs))
        if inner_sol.status is not LpStatus.OPTIMAL:
            raise ValueError(f"inner LP terminated {inner_sol.status.value}")
        inner_cert = _inner_certificate(partition, problem, inner_sol)

        if all_pairs:
            outer_lp = build_outer_lp(partition, problem, all_pairs=True)
            outer_sol = solve_lp(outer_lp)
            pool_n = pool.shape[1]
            ids = [(a, b) for a in range(pool_n) for b in range(a, pool_n)]
            costs = outer_lp.c
        else:
            costs, cols, ids = outer_data.assemble(partition)
            outer_sol = solve_lp(LpProblem(costs, cols, rhs))
        if outer_sol.status is not LpStatus.OPTIMAL:
            raise ValueError(f"outer LP terminated {outer_sol.status.value}")
        outer_cert = _outer_certificate(partition, problem, outer_sol, ids, costs)

        trace.append(it, outer_cert.value, inner_cert.value,
                     partition.vertex_count, len(partition.simplices),
                     time.perf_counter() - t0)
        if inner_cert.value - outer_cert.value <= tol:
            converged = True
            break
        if it + 1 < max_iters:
            refine_step(partition, inner_cert, outer_cert, force_uniform=(it % 5 == 4))

    factor_columns = [np.sqrt(w) * b for b, w in inner_cert.active_vertices]
    return CpSolution(
        value=inner_cert.value,
        factor_columns=factor_columns,
        gap=inner_cert.value - outer_cert.value,
        trace=trace,
        dual_y=outer_cert.dual_y,
        converged=converged,
        iterations=iterations,
        inner_certificate=inner_cert if keep_certificates else None,
        outer_certificate=outer_cert if keep_certificates else None,
        partition=partition if keep_partition else None,
    )
