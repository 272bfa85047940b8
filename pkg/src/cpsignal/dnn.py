"""Doubly nonnegative relaxation of the signaling cone program.

Replaces the completely positive cone by PSD ∩ nonnegative-orthant, which is
exact for n <= 4 and a lower bound otherwise. Solved by three-set consensus
splitting (scaled ADMM with penalty 1): one copy per constraint set

    X1: affine  {X symmetric : W (X 1) = rhs}   (plus the linear objective)
    X2: entrywise nonnegative
    X3: positive semidefinite

averaged into a consensus iterate whose affine/nonnegativity/PSD
infeasibility norms drive the stopping rule. Residual convergence alone is
not enough (the consensus starts feasible), so the consensus mismatch and
the iterate step are required to fall below tolerance as well.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import SignalingProblem
from .solver import constraint_rows

# Above this size LAPACK takes over from the Jacobi kernel inside the ADMM
# loop; the sym_eig contract itself is always served by the Jacobi kernel.
JACOBI_MAX_N = 32


def sym_eig(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns eigenvalues in ascending order and orthonormal eigenvectors as
    matching columns. Raises ValueError when Q is not symmetric to 1e-10.
    """
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError("sym_eig requires a square matrix")
    scale = max(1.0, float(np.max(np.abs(Q))))
    if np.max(np.abs(Q - Q.T)) > 1e-10 * scale:
        raise ValueError("sym_eig requires a symmetric matrix")
    w, E = _kernels.jacobi_eig(Q)
    return np.asarray(w), np.asarray(E)


def _eig(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if Q.shape[0] <= JACOBI_MAX_N:
        return _kernels.jacobi_eig(Q)
    return np.linalg.eigh(Q)


def psd_project(Q: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix: symmetrize, then clamp negative eigenvalues."""
    Q = 0.5 * (Q + Q.T)
    w, E = _eig(Q)
    if w[0] >= 0.0:
        return Q
    wp = np.maximum(w, 0.0)
    return (E * wp) @ E.T


@dataclass(frozen=True)
class DnnSolution:
    Xi: np.ndarray
    value: float
    residuals: tuple[float, float, float]  # (affine, nonneg, psd)
    iterations: int
    converged: bool


class _AffineProjector:
    """Closed-form projection onto {X symmetric : W (X 1) = rhs}."""

    def __init__(self, W: np.ndarray, rhs: np.ndarray, n: int):
        self.W = W
        self.rhs = rhs
        self.ones = np.ones(n)
        w1 = W @ self.ones
        K = 0.5 * n * (W @ W.T) + 0.5 * np.outer(w1, w1)
        self.Kpinv = np.linalg.pinv(K)

    def __call__(self, Q: np.ndarray) -> np.ndarray:
        mu = self.Kpinv @ (self.rhs - self.W @ (Q @ self.ones))
        t = self.W.T @ mu
        return Q + 0.5 * (np.outer(t, self.ones) + np.outer(self.ones, t))


def solve_dnn(problem: SignalingProblem, tol: float = 1e-7, max_iters: int = 100_000) -> DnnSolution:
    """Solve min tr(Vbar X) over the doubly nonnegative relaxation.

    The returned value equals the completely positive optimum (within
    splitting accuracy) whenever n <= 4, and lower-bounds it otherwise.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = problem.n
    W, rhs = constraint_rows(problem)
    proj_affine = _AffineProjector(W, rhs, n)
    Vbar = problem.Vbar
    ones = np.ones(n)
    # Penalty scaled with n: iterates live on the scale of diag(p_o) ~ 1/n
    # while the cost matrix stays O(1), and a unit penalty stalls for large n.
    Vstep = Vbar / float(n)

    Z = np.diag(problem.p_o.copy())
    U1 = np.zeros((n, n))
    U2 = np.zeros((n, n))
    U3 = np.zeros((n, n))
    check_every = 20
    residuals = (np.inf, np.inf, np.inf)
    converged = False
    it = 0

    while it < max_iters:
        it += 1
        X1 = proj_affine(Z - U1 - Vstep)
        X2 = np.maximum(Z - U2, 0.0)
        X3 = psd_project(Z - U3)
        Znew = (X1 + X2 + X3 + U1 + U2 + U3) / 3.0
        U1 += X1 - Znew
        U2 += X2 - Znew
        U3 += X3 - Znew
        if it % check_every == 0 or it == max_iters:
            step = float(np.max(np.abs(Znew - Z)))
            consensus = max(
                float(np.max(np.abs(X1 - Znew))),
                float(np.max(np.abs(X2 - Znew))),
                float(np.max(np.abs(X3 - Znew))),
            )
            aff = float(np.max(np.abs(W @ (Znew @ ones) - rhs)))
            neg = max(0.0, -float(np.min(Znew)))
            w, _ = _eig(0.5 * (Znew + Znew.T))
            psd = max(0.0, -float(w[0]))
            residuals = (aff, neg, psd)
            if max(aff, neg, psd) <= tol and consensus <= tol and step <= tol:
                Z = Znew
                converged = True
                break
        Z = Znew

    Z = 0.5 * (Z + Z.T)
    return DnnSolution(
        Xi=Z,
        value=float(np.sum(Vbar * Z)),
        residuals=residuals,
        iterations=it,
        converged=converged,
    )
