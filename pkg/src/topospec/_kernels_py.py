"""Pure-Python twins of the compiled kernels (same operations, same order)."""

import numpy as np


def neumaier_sum(values, s=0.0, c=0.0):
    """Compensated running sum; returns the updated ``(s, c)`` state."""
    s = float(s)
    c = float(c)
    for x in np.asarray(values, dtype=np.float64).tolist():
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s, c


def ldl_coframe(g, signature, tol):
    """Batched signed LDL^T: returns (e, status) with e = sqrt|D| L^T.

    Vectorised over the batch axis; per-point arithmetic matches the
    compiled loop exactly.
    """
    g = np.ascontiguousarray(g, dtype=np.float64)
    signature = np.asarray(signature, dtype=np.float64)
    N, n, _ = g.shape
    L = np.zeros((N, n, n))
    d = np.zeros((N, n))
    status = np.zeros(N, dtype=np.int8)
    alive = np.ones(N, dtype=bool)
    for j in range(n):
        acc = g[:, j, j].copy()
        for k in range(j):
            acc = acc - (L[:, j, k] * L[:, j, k]) * d[:, k]
        d[:, j] = acc
        L[:, j, j] = 1.0
        small = alive & (np.abs(acc) < tol)
        status[small] = 1
        alive &= ~small
        wrong = alive & ((acc > 0.0) != (signature[j] > 0.0))
        status[wrong] = 2
        alive &= ~wrong
        safe = np.where(alive, acc, 1.0)
        for i in range(j + 1, n):
            acc_i = g[:, i, j].copy()
            for k in range(j):
                acc_i = acc_i - (L[:, i, k] * L[:, j, k]) * d[:, k]
            L[:, i, j] = np.where(alive, acc_i / safe, 0.0)
    e = np.zeros((N, n, n))
    dj = np.sqrt(np.abs(d))
    for j in range(n):
        for i in range(j, n):
            e[:, j, i] = dj[:, j] * L[:, i, j]
    e[~alive] = 0.0
    return e, status


def spin_connection(e, de, eta):
    """Connection coefficients omega_{ab,mu} (a<b) from a coframe and its gradient.

    ``de[p, mu, a, nu] = d_mu e^a_nu``. Agrees with the compiled kernel to
    rounding (the small inverses are computed differently).
    """
    e = np.asarray(e, dtype=np.float64)
    de = np.asarray(de, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    n = e.shape[1]
    curl = np.transpose(de, (0, 2, 1, 3)) - np.transpose(de, (0, 2, 3, 1))  # [p, a, mu, nu]
    E = np.linalg.inv(e)  # [p, mu, a]
    D = np.swapaxes(E, 1, 2)[:, None] @ curl @ E[:, None]
    D = D * eta[None, :, None, None]
    w = 0.5 * (np.transpose(D, (0, 3, 1, 2)) - np.transpose(D, (0, 2, 3, 1)) + D)
    w_coord = w @ e[:, None]
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    if not pairs:
        return np.zeros((len(e), 0, n))
    return np.stack([w_coord[:, a, b, :] for a, b in pairs], axis=1)
