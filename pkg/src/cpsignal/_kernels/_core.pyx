# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: dense revised simplex and cyclic Jacobi eigensolver.

Algorithm-identical to ``pure.py``; keep the two files in sync when touching
pivot or rotation logic.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

cdef double RC_TOL = 1e-9
cdef double PIV_TOL = 1e-11
cdef double DEGEN_TOL = 1e-12
cdef double FEAS_TOL = 1e-9
cdef int REFACTOR_EVERY = 128

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_UNBOUNDED = 2
STATUS_NUMERICAL = 3


cdef int _gauss_jordan_inv(double[:, ::1] B, double[:, ::1] out, Py_ssize_t M) noexcept:
    """Invert B into out via Gauss-Jordan with partial pivoting. 0 ok, 1 singular."""
    cdef Py_ssize_t i, j, k, piv
    cdef double best, factor, tmp
    for i in range(M):
        for j in range(M):
            out[i, j] = 1.0 if i == j else 0.0
    for k in range(M):
        piv = k
        best = fabs(B[k, k])
        for i in range(k + 1, M):
            if fabs(B[i, k]) > best:
                best = fabs(B[i, k])
                piv = i
        if best < 1e-14:
            return 1
        if piv != k:
            for j in range(M):
                tmp = B[k, j]; B[k, j] = B[piv, j]; B[piv, j] = tmp
                tmp = out[k, j]; out[k, j] = out[piv, j]; out[piv, j] = tmp
        factor = B[k, k]
        for j in range(M):
            B[k, j] /= factor
            out[k, j] /= factor
        for i in range(M):
            if i == k:
                continue
            factor = B[i, k]
            if factor != 0.0:
                for j in range(M):
                    B[i, j] -= factor * B[k, j]
                    out[i, j] -= factor * out[k, j]
    return 0


cdef int _refactorize(double[:, ::1] A, long[::1] basis, double[::1] b,
                      double[:, ::1] Binv, double[::1] xB,
                      double[:, ::1] scratch, Py_ssize_t M, Py_ssize_t N) noexcept:
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(M):
        for j in range(M):
            if basis[j] < N:
                scratch[i, j] = A[i, basis[j]]
            else:
                scratch[i, j] = 1.0 if basis[j] - N == i else 0.0
    if _gauss_jordan_inv(scratch, Binv, M):
        return 1
    for i in range(M):
        acc = 0.0
        for j in range(M):
            acc += Binv[i, j] * b[j]
        xB[i] = acc
    return 0


def simplex_solve(object A_in, object b_in, object c_in, long bland_after, long max_iters):
    """Two-phase dense revised simplex; see pure.simplex_solve for the contract."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] A = np.ascontiguousarray(A_in, dtype=np.float64).copy()
    cdef cnp.ndarray[double, ndim=1] b = np.asarray(b_in, dtype=np.float64).copy()
    cdef cnp.ndarray[double, ndim=1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef Py_ssize_t M = A.shape[0], N = A.shape[1]
    cdef Py_ssize_t i, j, r, jj, phase
    cdef double ui, t, acc, piv, theta, best_t, infeas, abest
    cdef long best_var, iters = 0, degenerate = 0, since_refactor = 0
    cdef bint bland = False
    cdef Py_ssize_t best_r, jbest

    cdef cnp.ndarray[double, ndim=1] sign = np.where(b < 0.0, -1.0, 1.0)
    cdef double[:, ::1] Am
    cdef double[::1] bm, cm, signm
    for i in range(M):
        if sign[i] < 0.0:
            for j in range(N):
                A[i, j] = -A[i, j]
            b[i] = -b[i]
    Am = A
    bm = b
    cm = c
    signm = sign

    cdef cnp.ndarray[long, ndim=1] basis_arr = np.arange(N, N + M, dtype=np.int64)
    cdef long[::1] basis = basis_arr
    cdef double[:, ::1] Binv = np.eye(M)
    cdef double[::1] xB = b.copy()
    cdef double[::1] y = np.zeros(M)
    cdef double[::1] d = np.zeros(N)
    cdef double[::1] u = np.zeros(M)
    cdef double[::1] cB = np.zeros(M)
    cdef double[:, ::1] scratch = np.zeros((M, M))
    cdef cnp.ndarray[double, ndim=1] x_out
    cdef cnp.ndarray[double, ndim=1] y_out
    cdef bint in_basis

    for phase in range(1, 3):
        while True:
            if iters >= max_iters:
                return STATUS_NUMERICAL, None, None, 0.0, iters
            for i in range(M):
                if phase == 1:
                    cB[i] = 1.0 if basis[i] >= N else 0.0
                else:
                    cB[i] = cm[basis[i]] if basis[i] < N else 0.0
            for j in range(M):
                acc = 0.0
                for i in range(M):
                    acc += cB[i] * Binv[i, j]
                y[j] = acc
            for j in range(N):
                acc = cm[j] if phase == 2 else 0.0
                for i in range(M):
                    acc -= Am[i, j] * y[i]
                d[j] = acc

            jj = -1
            if bland:
                for j in range(N):
                    if d[j] < -RC_TOL:
                        jj = j
                        break
            else:
                acc = d[0]
                jj = 0
                for j in range(1, N):
                    if d[j] < acc:
                        acc = d[j]
                        jj = j
                if acc >= -RC_TOL:
                    jj = -1
            if jj < 0:
                break

            for i in range(M):
                acc = 0.0
                for j in range(M):
                    acc += Binv[i, j] * Am[j, jj]
                u[i] = acc

            best_t = 0.0
            best_r = -1
            best_var = -1
            for i in range(M):
                ui = u[i]
                if ui <= PIV_TOL:
                    continue
                t = xB[i] / ui
                if t < 0.0:
                    t = 0.0
                if best_r < 0 or t < best_t - 1e-12:
                    best_t = t
                    best_r = i
                    best_var = basis[i]
                elif t <= best_t + 1e-12 and basis[i] < best_var:
                    best_r = i
                    best_var = basis[i]
                    if t < best_t:
                        best_t = t
            if best_r < 0:
                for i in range(M):
                    if u[i] > 0.0:
                        return STATUS_NUMERICAL, None, None, 0.0, iters
                if phase == 2:
                    return STATUS_UNBOUNDED, None, None, 0.0, iters
                return STATUS_NUMERICAL, None, None, 0.0, iters
            r = best_r
            theta = best_t

            if theta < DEGEN_TOL:
                degenerate += 1
                if degenerate > bland_after:
                    bland = True

            for i in range(M):
                xB[i] -= theta * u[i]
            xB[r] = theta
            basis[r] = jj
            piv = u[r]
            for j in range(M):
                Binv[r, j] /= piv
            for i in range(M):
                if i == r:
                    continue
                ui = u[i]
                if ui != 0.0:
                    for j in range(M):
                        Binv[i, j] -= ui * Binv[r, j]
            iters += 1
            since_refactor += 1
            if since_refactor >= REFACTOR_EVERY:
                if _refactorize(Am, basis, bm, Binv, xB, scratch, M, N):
                    return STATUS_NUMERICAL, None, None, 0.0, iters
                since_refactor = 0

        if phase == 1:
            infeas = 0.0
            for i in range(M):
                if basis[i] >= N:
                    infeas += xB[i]
            if infeas > FEAS_TOL:
                return STATUS_INFEASIBLE, None, None, 0.0, iters
            for r in range(M):
                if basis[r] < N:
                    continue
                xB[r] = 0.0
                jbest = -1
                abest = 1e-9
                for j in range(N):
                    in_basis = False
                    for i in range(M):
                        if basis[i] == j:
                            in_basis = True
                            break
                    if in_basis:
                        continue
                    acc = 0.0
                    for i in range(M):
                        acc += Binv[r, i] * Am[i, j]
                    if fabs(acc) > abest:
                        abest = fabs(acc)
                        jbest = j
                if jbest < 0:
                    continue
                for i in range(M):
                    acc = 0.0
                    for j in range(M):
                        acc += Binv[i, j] * Am[j, jbest]
                    u[i] = acc
                basis[r] = jbest
                piv = u[r]
                for j in range(M):
                    Binv[r, j] /= piv
                for i in range(M):
                    if i == r:
                        continue
                    ui = u[i]
                    if ui != 0.0:
                        for j in range(M):
                            Binv[i, j] -= ui * Binv[r, j]
                xB[r] = 0.0

    x_out = np.zeros(N)
    for i in range(M):
        if basis[i] < N:
            x_out[basis[i]] = xB[i]
    for i in range(M):
        cB[i] = cm[basis[i]] if basis[i] < N else 0.0
    y_out = np.zeros(M)
    for j in range(M):
        acc = 0.0
        for i in range(M):
            acc += cB[i] * Binv[i, j]
        y_out[j] = acc * signm[j]
    acc = 0.0
    for j in range(N):
        acc += cm[j] * x_out[j]
    return STATUS_OPTIMAL, x_out, y_out, acc, iters


def jacobi_eig(object Q, double rel_tol=1e-12, int max_sweeps=60):
    """Cyclic Jacobi eigendecomposition; see pure.jacobi_eig for the contract."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] A = np.array(Q, dtype=np.float64, copy=True, order="C")
    cdef Py_ssize_t n = A.shape[0]
    cdef cnp.ndarray[double, ndim=2, mode="c"] E = np.eye(n)
    cdef double[:, ::1] a = A
    cdef double[:, ::1] e = E
    cdef Py_ssize_t p, q, i, sweep
    cdef double fro, off, off_tol, skip_tol
    cdef double apq, theta, t, cs, sn, tau, app, aqq, aip, aiq, vip, viq
    cdef bint converged = False

    if n == 1:
        return A.diagonal().copy(), E
    fro = 0.0
    for p in range(n):
        for q in range(n):
            fro += a[p, q] * a[p, q]
    fro = sqrt(fro)
    if fro == 0.0:
        return np.zeros(n), E
    off_tol = rel_tol * fro
    skip_tol = off_tol / (2.0 * n)

    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        off = sqrt(off)
        if off <= off_tol:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if fabs(apq) <= skip_tol:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                cs = 1.0 / sqrt(t * t + 1.0)
                sn = t * cs
                tau = sn / (1.0 + cs)

                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    if i == p or i == q:
                        continue
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = aip - sn * (aiq + tau * aip)
                    a[i, q] = aiq + sn * (aip - tau * aiq)
                    a[p, i] = a[i, p]
                    a[q, i] = a[i, q]
                for i in range(n):
                    vip = e[i, p]
                    viq = e[i, q]
                    e[i, p] = vip - sn * (viq + tau * vip)
                    e[i, q] = viq + sn * (vip - tau * viq)
    if not converged:
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        if sqrt(off) > off_tol:
            raise RuntimeError("jacobi_eig failed to converge")

    w = A.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], E[:, order]
