"""Pure-numpy implementations of the hot kernels.

Mirrors the algorithms in ``_core.pyx`` step for step (same pivot rules,
same rotation order) so the compiled and fallback paths agree to floating
round-off. Selected automatically when the extension is unavailable or
``CPSIGNAL_PURE=1`` is set.
"""

import numpy as np

# Shared tolerances; keep in sync with _core.pyx.
RC_TOL = 1e-9      # reduced-cost threshold for entering candidates
PIV_TOL = 1e-11    # smallest acceptable pivot magnitude in the ratio test
DEGEN_TOL = 1e-12  # steps below this count as degenerate pivots
FEAS_TOL = 1e-9    # phase-1 objective above this means infeasible
REFACTOR_EVERY = 128

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_UNBOUNDED = 2
STATUS_NUMERICAL = 3


def _refactorize(A, basis, b):
    """Recompute the basis inverse and basic solution from scratch."""
    M, N = A.shape
    B = np.empty((M, M))
    for i, j in enumerate(basis):
        if j < N:
            B[:, i] = A[:, j]
        else:
            B[:, i] = 0.0
            B[j - N, i] = 1.0
    try:
        Binv = np.linalg.inv(B)
    except np.linalg.LinAlgError:
        return None, None
    return Binv, Binv @ b

def _ratio_test(xB, u, basis, M):
    """Smallest-ratio row; ties go to the lowest basis variable index."""
    best_t = np.inf
    best_r = -1
    best_var = -1
    for i in range(M):
        ui = u[i]
        if ui <= PIV_TOL:
            continue
        t = xB[i] / ui
        if t < 0.0:
            t = 0.0
        if t < best_t - 1e-12:
            best_t, best_r, best_var = t, i, basis[i]
        elif t <= best_t + 1e-12 and basis[i] < best_var:
            best_r, best_var = i, basis[i]
            if t < best_t:
                best_t = t
    return best_r, best_t


def simplex_solve(A, b, c, bland_after, max_iters):
    """Two-phase dense revised simplex for min c'x s.t. Ax = b, x >= 0.

    Dantzig pricing, switching to Bland's rule permanently after
    ``bland_after`` degenerate pivots. Returns
    ``(status, x, y, objective, iterations)``; ``y`` are the equality
    multipliers in the caller's row convention.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).copy()
    c = np.asarray(c, dtype=np.float64)
    M, N = A.shape

    sign = np.where(b < 0.0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    basis = np.arange(N, N + M, dtype=np.int64)
    Binv = np.eye(M)
    xB = b.copy()
    c2 = np.concatenate([c, np.zeros(M)])

    bland = False
    degenerate = 0
    iters = 0
    pivots_since_refactor = 0

    for phase in (1, 2):
        while True:
            if iters >= max_iters:
                return STATUS_NUMERICAL, None, None, 0.0, iters
            if phase == 1:
                cB = np.where(basis >= N, 1.0, 0.0)
            else:
                cB = c2[basis]
            y = cB @ Binv
            d = (c if phase == 2 else 0.0) - A.T @ y

            if bland:
                cand = np.nonzero(d < -RC_TOL)[0]
                j = int(cand[0]) if cand.size else -1
            else:
                j = int(np.argmin(d))
                if d[j] >= -RC_TOL:
                    j = -1
            if j < 0:
                break  # phase optimal

            u = Binv @ A[:, j]
            r, theta = _ratio_test(xB, u, basis, M)
            if r < 0:
                if np.any(u > 0.0):
                    return STATUS_NUMERICAL, None, None, 0.0, iters
                if phase == 2:
                    return STATUS_UNBOUNDED, None, None, 0.0, iters
                return STATUS_NUMERICAL, None, None, 0.0, iters

            if theta < DEGEN_TOL:
                degenerate += 1
                if degenerate > bland_after:
                    bland = True

            xB -= theta * u
            xB[r] = theta
            basis[r] = j
            piv_row = Binv[r] / u[r]
            Binv -= np.outer(u, piv_row)
            Binv[r] = piv_row
            iters += 1
            pivots_since_refactor += 1
            if pivots_since_refactor >= REFACTOR_EVERY:
                Binv, xB = _refactorize(A, basis, b)
                if Binv is None:
                    return STATUS_NUMERICAL, None, None, 0.0, iters
                pivots_since_refactor = 0

        if phase == 1:
            infeas = float(np.sum(xB[basis >= N]))
            if infeas > FEAS_TOL:
                return STATUS_INFEASIBLE, None, None, 0.0, iters
            # swap surviving artificials for real columns where possible
            for r in range(M):
                if basis[r] < N:
                    continue
                xB[r] = 0.0
                row = Binv[r] @ A
                jbest = -1
                abest = 1e-9
                in_basis = set(int(t) for t in basis)
                for jj in range(N):
                    if jj in in_basis:
                        continue
                    if abs(row[jj]) > abest:
                        abest = abs(row[jj])
                        jbest = jj
                if jbest < 0:
                    continue  # redundant row; artificial stays basic at zero
                u = Binv @ A[:, jbest]
                basis[r] = jbest
                piv_row = Binv[r] / u[r]
                Binv -= np.outer(u, piv_row)
                Binv[r] = piv_row
                xB[r] = 0.0

    x = np.zeros(N)
    for i in range(M):
        if basis[i] < N:
            x[basis[i]] = xB[i]
    cB = c2[basis]
    y = (cB @ Binv) * sign
    return STATUS_OPTIMAL, x, y, float(c @ x), iters


def jacobi_eig(Q, rel_tol=1e-12, max_sweeps=60):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps row by row until the off-diagonal Frobenius norm drops below
    ``rel_tol * ||Q||_F``. Returns eigenvalues in ascending order and the
    matching orthonormal eigenvectors as columns.
    """
    A = np.array(Q, dtype=np.float64, copy=True)
    n = A.shape[0]
    E = np.eye(n)
    if n == 1:
        return A.diagonal().copy(), E
    fro = float(np.linalg.norm(A))
    if fro == 0.0:
        return np.zeros(n), E
    off_tol = rel_tol * fro
    skip_tol = off_tol / (2.0 * n)

    idx = np.arange(n)
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(np.tril(A, -1) ** 2) * 2.0))
        if off <= off_tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= skip_tol:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                cs = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * cs
                tau = sn / (1.0 + cs)

                app, aqq = A[p, p], A[q, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                others = idx[(idx != p) & (idx != q)]
                aip = A[others, p].copy()
                aiq = A[others, q].copy()
                A[others, p] = aip - sn * (aiq + tau * aip)
                A[others, q] = aiq + sn * (aip - tau * aiq)
                A[p, others] = A[others, p]
                A[q, others] = A[others, q]

                vip = E[:, p].copy()
                viq = E[:, q].copy()
                E[:, p] = vip - sn * (viq + tau * vip)
                E[:, q] = viq + sn * (vip - tau * viq)
    else:
        raise RuntimeError("jacobi_eig failed to converge")

    w = A.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], E[:, order]
