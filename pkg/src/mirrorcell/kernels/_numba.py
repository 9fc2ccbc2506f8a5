"""Loop kernels compiled with numba; same signatures and results as ``_numpy``."""
from __future__ import annotations

import numpy as np
from numba import njit

_OPTS = dict(cache=True, nogil=True, fastmath=False)


@njit(**_OPTS)
def _ipow(x, e):
    out = 1.0 + 0.0j
    for _ in range(e):
        out *= x
    return out


@njit(**_OPTS)
def _lead(Y, n, k):
    p = 1.0 + 0.0j
    for a in range(k):
        p *= Y[n, a]
    return p


@njit(**_OPTS)
def _lead_except(Y, n, k, skip):
    p = 1.0 + 0.0j
    for a in range(k):
        if a != skip:
            p *= Y[n, a]
    return p


@njit(**_OPTS)
def map_f(Y, k, r):
    n, ell = Y.shape
    Z = np.empty((n, ell - 1), dtype=np.complex128)
    for s in range(n):
        lead = _lead(Y, s, k)
        last = _ipow(Y[s, ell - 1], r)
        for i in range(ell - 1):
            Z[s, i] = lead * (_ipow(Y[s, i], r) - last)
    return Z


@njit(**_OPTS)
def fiber_residual(Y, z, k, r):
    n, ell = Y.shape
    out = np.empty(n)
    for s in range(n):
        lead = _lead(Y, s, k)
        last = _ipow(Y[s, ell - 1], r)
        worst = 0.0
        for i in range(ell - 1):
            e = abs(lead * (_ipow(Y[s, i], r) - last) - z[i])
            if e > worst:
                worst = e
        out[s] = worst
    return out


@njit(**_OPTS)
def jacobian(Y, k, r):
    n, ell = Y.shape
    J = np.zeros((n, ell - 1, ell), dtype=np.complex128)
    for s in range(n):
        lead = _lead(Y, s, k)
        last = _ipow(Y[s, ell - 1], r)
        dlast = r * _ipow(Y[s, ell - 1], r - 1)
        for i in range(ell - 1):
            diff = _ipow(Y[s, i], r) - last
            for a in range(k):
                J[s, i, a] += diff * _lead_except(Y, s, k, a)
            J[s, i, i] += lead * r * _ipow(Y[s, i], r - 1)
            J[s, i, ell - 1] -= lead * dlast
    return J


@njit(**_OPTS)
def min_abs_forms(Y, C):
    n, ell = Y.shape
    m = C.shape[0]
    out = np.empty(n)
    for s in range(n):
        best = np.inf
        for h in range(m):
            acc = 0.0 + 0.0j
            for j in range(ell):
                acc += C[h, j] * Y[s, j]
            v = abs(acc)
            if v < best:
                best = v
        out[s] = best
    return out


@njit(**_OPTS)
def homogeneous_residual(P, z, k, r):
    n, L = P.shape
    ell = L - 1
    out = np.empty(n)
    for s in range(n):
        lead = 1.0 + 0.0j
        for a in range(k):
            lead *= P[s, a + 1]
        last = _ipow(P[s, ell], r)
        d1 = _ipow(P[s, 1], r) - last
        worst = abs(lead * d1 - z[0] * _ipow(P[s, 0], k + r))
        for i in range(1, ell - 1):
            e = abs(z[i] * d1 - z[0] * (_ipow(P[s, i + 1], r) - last))
            if e > worst:
                worst = e
        out[s] = worst
    return out


@njit(**_OPTS)
def homogeneous_gradients(P, z, k, r):
    n, L = P.shape
    ell = L - 1
    G = np.zeros((n, ell - 1, L), dtype=np.complex128)
    for s in range(n):
        lead = 1.0 + 0.0j
        for a in range(k):
            lead *= P[s, a + 1]
        d1 = _ipow(P[s, 1], r) - _ipow(P[s, ell], r)
        dfirst = r * _ipow(P[s, 1], r - 1)
        dlast = r * _ipow(P[s, ell], r - 1)
        G[s, 0, 0] = -z[0] * (k + r) * _ipow(P[s, 0], k + r - 1)
        for a in range(k):
            p = 1.0 + 0.0j
            for b in range(k):
                if b != a:
                    p *= P[s, b + 1]
            G[s, 0, a + 1] += d1 * p
        G[s, 0, 1] += lead * dfirst
        G[s, 0, ell] -= lead * dlast
        for i in range(1, ell - 1):
            G[s, i, 1] += z[i] * dfirst
            G[s, i, ell] += (z[0] - z[i]) * dlast
            G[s, i, i + 1] -= z[0] * r * _ipow(P[s, i + 1], r - 1)
    return G


@njit(**_OPTS)
def _euler_terms(a, b, zk, r):
    n = a.shape[0]
    k = zk.shape[0]
    F = np.empty(n, dtype=np.complex128)
    Fa = np.empty(n, dtype=np.complex128)
    Fb = np.empty(n, dtype=np.complex128)
    for s in range(n):
        ar = _ipow(a[s], r)
        prod = 1.0 + 0.0j
        for i in range(k):
            prod *= a[s] * zk[i] + b[s]
        sa = 0.0 + 0.0j
        sb = 0.0 + 0.0j
        for i in range(k):
            p = 1.0 + 0.0j
            for j in range(k):
                if j != i:
                    p *= a[s] * zk[j] + b[s]
            sa += zk[i] * p
            sb += p
        F[s] = ar * prod
        Fa[s] = r * _ipow(a[s], r - 1) * prod + ar * sa
        Fb[s] = ar * sb
    return F, Fa, Fb


def euler_terms(a, b, zk, r):
    return _euler_terms(a, b, np.ascontiguousarray(zk, dtype=np.complex128), r)
