"""Dense linear programming over equality constraints with nonnegative variables.

All programs here are of the form  min c'x  s.t.  Ax = b, x >= 0.  The engine
is a two-phase dense revised simplex with Dantzig pricing that switches to
Bland's rule after ``10 * (M + N)`` degenerate pivots, which makes every solve
deterministic for identical input.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels


class LpNumericalError(RuntimeError):
    """Raised when no pivot of acceptable magnitude exists."""


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """min c'x s.t. Ax = b, x >= 0 with dense data."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.c, dtype=np.float64)
        A = np.ascontiguousarray(self.A, dtype=np.float64)
        b = np.ascontiguousarray(self.b, dtype=np.float64)
        if A.ndim != 2:
            raise ValueError("A must be a matrix")
        m, n = A.shape
        if m < 1 or n < 1:
            raise ValueError("LP needs at least one row and one column")
        if c.shape != (n,) or b.shape != (m,):
            raise ValueError(
                f"shape mismatch: A is {m}x{n}, c has {c.shape}, b has {b.shape}"
            )
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("LP data must be finite")
        if np.any(np.max(np.abs(A), axis=1) == 0.0):
            raise ValueError("A contains an all-zero row")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def shape(self):
        return self.A.shape


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None
    objective: float | None
    y: np.ndarray | None  # equality multipliers

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def solve_lp(problem: LpProblem, max_iters: int | None = None) -> LpSolution:
    """Solve an LpProblem; deterministic given identical input.

    Raises LpNumericalError when pivot magnitudes fall below 1e-11 and no
    valid pivot exists (or the iteration guard trips).
    """
    m, n = problem.shape
    bland_after = 10 * (m + n)
    if max_iters is None:
        max_iters = 10_000 + 200 * (m + n)
    status, x, y, obj, _ = _kernels.simplex_solve(
        problem.A, problem.b, problem.c, bland_after, max_iters
    )
    if status == _kernels.STATUS_NUMERICAL:
        raise LpNumericalError("simplex: no acceptable pivot (magnitude < 1e-11)")
    if status == _kernels.STATUS_INFEASIBLE:
        return LpSolution(LpStatus.INFEASIBLE, None, None, None)
    if status == _kernels.STATUS_UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, None, None, None)
    return LpSolution(LpStatus.OPTIMAL, x, float(obj), y)
