# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Must stay operation-for-operation identical to _kernels_py."""

from libc.math cimport fabs, sqrt

import numpy as np


def neumaier_sum(const double[::1] values, double s=0.0, double c=0.0):
    """Compensated running sum; returns the updated ``(s, c)`` state."""
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double x, t
    for i in range(n):
        x = values[i]
        t = s + x
        if fabs(s) >= fabs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s, c


def ldl_coframe(const double[:, :, ::1] g, const double[::1] signature, double tol):
    """Batched signed LDL^T: returns (e, status) with e = sqrt|D| L^T.

    status: 0 ok, 1 pivot below tol, 2 pivot sign disagrees with signature.
    """
    cdef Py_ssize_t N = g.shape[0], n = g.shape[1]
    cdef Py_ssize_t p, i, j, k
    cdef double acc, dj
    L_arr = np.zeros((n, n), dtype=np.float64)
    d_arr = np.zeros(n, dtype=np.float64)
    e_arr = np.zeros((N, n, n), dtype=np.float64)
    status_arr = np.zeros(N, dtype=np.int8)
    cdef double[:, ::1] L = L_arr
    cdef double[::1] d = d_arr
    cdef double[:, :, ::1] e = e_arr
    cdef signed char[::1] status = status_arr
    for p in range(N):
        for j in range(n):
            acc = g[p, j, j]
            for k in range(j):
                acc = acc - (L[j, k] * L[j, k]) * d[k]
            d[j] = acc
            L[j, j] = 1.0
            if fabs(acc) < tol:
                status[p] = 1
                break
            if (acc > 0.0) != (signature[j] > 0.0):
                status[p] = 2
                break
            for i in range(j + 1, n):
                acc = g[p, i, j]
                for k in range(j):
                    acc = acc - (L[i, k] * L[j, k]) * d[k]
                L[i, j] = acc / d[j]
        if status[p] != 0:
            continue
        for j in range(n):
            dj = sqrt(fabs(d[j]))
            for i in range(j, n):
                e[p, j, i] = dj * L[i, j]
    return e_arr, status_arr


def spin_connection(const double[:, :, ::1] e, const double[:, :, :, ::1] de, const double[::1] eta):
    """Connection coefficients omega_{ab,mu} (a<b) from a coframe and its gradient.

    ``de[p, mu, a, nu] = d_mu e^a_nu``. Returns ``(N, n(n-1)/2, n)``.
    """
    cdef Py_ssize_t N = e.shape[0], n = e.shape[1]
    cdef Py_ssize_t p, a, b, c, m, k, piv, col, row, npairs = n * (n - 1) // 2
    cdef double M[4][8]
    cdef double Einv[4][4]
    cdef double curl[4][4][4]
    cdef double D[4][4][4]
    cdef double w[4][4][4]
    cdef double t, best, acc
    if n > 4:
        raise ValueError("compiled spin connection supports dim <= 4")
    out_arr = np.zeros((N, npairs, n), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    for p in range(N):
        # Gauss-Jordan inverse with partial pivoting: Einv[mu][a]
        for row in range(n):
            for col in range(n):
                M[row][col] = e[p, row, col]
                M[row][n + col] = 1.0 if row == col else 0.0
        for col in range(n):
            piv = col
            best = fabs(M[col][col])
            for row in range(col + 1, n):
                if fabs(M[row][col]) > best:
                    best = fabs(M[row][col])
                    piv = row
            if piv != col:
                for k in range(2 * n):
                    t = M[col][k]
                    M[col][k] = M[piv][k]
                    M[piv][k] = t
            t = M[col][col]
            for k in range(2 * n):
                M[col][k] = M[col][k] / t
            for row in range(n):
                if row != col:
                    t = M[row][col]
                    if t != 0.0:
                        for k in range(2 * n):
                            M[row][k] = M[row][k] - t * M[col][k]
        # M[a][n+mu] = (e^-1)[a][mu]; e^-1 indexed [mu][a] in coordinate-first form
        for m in range(n):
            for a in range(n):
                Einv[m][a] = M[m][n + a]
        for a in range(n):
            for m in range(n):
                for k in range(n):
                    curl[a][m][k] = de[p, m, a, k] - de[p, k, a, m]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    acc = 0.0
                    for m in range(n):
                        for k in range(n):
                            acc = acc + curl[a][m][k] * Einv[m][b] * Einv[k][c]
                    D[a][b][c] = eta[a] * acc
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    w[a][b][c] = 0.5 * (D[b][c][a] - D[c][a][b] + D[a][b][c])
        k = 0
        for a in range(n):
            for b in range(a + 1, n):
                for m in range(n):
                    acc = 0.0
                    for c in range(n):
                        acc = acc + w[a][b][c] * e[p, c, m]
                    out[p, k, m] = acc
                k += 1
    return out_arr
