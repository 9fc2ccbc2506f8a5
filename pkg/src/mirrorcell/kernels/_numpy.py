"""Vectorized numpy implementations of the fiber kernels.

Conventions shared with the numba backend: ``Y`` is an (n, l) complex array of
affine points, ``P`` an (n, l+1) array of homogeneous points with the
coordinate y0 in column 0, ``z`` the (l-1,) base point, and ``k``, ``r`` the
arrangement parameters. All functions return new arrays.
"""
from __future__ import annotations

import numpy as np


def _ipow(x, e: int):
    # integer power with x**0 == 1 even at x == 0
    return np.ones_like(x) if e == 0 else x**e


def _prod_except(Y, k: int):
    """(n, k) array whose column a is the product of y_b, b < k, b != a."""
    n = Y.shape[0]
    out = np.ones((n, k), dtype=complex)
    for a in range(k):
        for b in range(k):
            if b != a:
                out[:, a] *= Y[:, b]
    return out


def map_f(Y, k, r):
    lead = np.prod(Y[:, :k], axis=1) if k else np.ones(Y.shape[0], dtype=complex)
    Yr = _ipow(Y, r)
    return lead[:, None] * (Yr[:, :-1] - Yr[:, -1:])


def fiber_residual(Y, z, k, r):
    return np.abs(map_f(Y, k, r) - z[None, :]).max(axis=1)


def jacobian(Y, k, r):
    n, ell = Y.shape
    lead = np.prod(Y[:, :k], axis=1) if k else np.ones(n, dtype=complex)
    Yr = _ipow(Y, r)
    dYr = r * _ipow(Y, r - 1)
    diff = Yr[:, :-1] - Yr[:, -1:]
    J = np.zeros((n, ell - 1, ell), dtype=complex)
    if k:
        dlead = _prod_except(Y, k)
        J[:, :, :k] = diff[:, :, None] * dlead[:, None, :]
    idx = np.arange(ell - 1)
    J[:, idx, idx] += lead[:, None] * dYr[:, :-1]
    J[:, :, -1] -= (lead * dYr[:, -1])[:, None]
    return J


def min_abs_forms(Y, C):
    return np.abs(Y @ C.T).min(axis=1)


def homogeneous_residual(P, z, k, r):
    y0, Y = P[:, 0], P[:, 1:]
    lead = np.prod(Y[:, :k], axis=1) if k else np.ones(P.shape[0], dtype=complex)
    Yr = _ipow(Y, r)
    d1 = Yr[:, 0] - Yr[:, -1]
    res = np.abs(lead * d1 - z[0] * _ipow(y0, k + r))
    if Y.shape[1] > 2:
        di = Yr[:, 1:-1] - Yr[:, -1:]
        other = np.abs(z[None, 1:] * d1[:, None] - z[0] * di).max(axis=1)
        res = np.maximum(res, other)
    return res


def homogeneous_gradients(P, z, k, r):
    n, L = P.shape
    ell = L - 1
    y0, Y = P[:, 0], P[:, 1:]
    lead = np.prod(Y[:, :k], axis=1) if k else np.ones(n, dtype=complex)
    Yr = _ipow(Y, r)
    dYr = r * _ipow(Y, r - 1)
    d1 = Yr[:, 0] - Yr[:, -1]
    G = np.zeros((n, ell - 1, L), dtype=complex)
    G[:, 0, 0] = -z[0] * (k + r) * _ipow(y0, k + r - 1)
    if k:
        G[:, 0, 1:k + 1] = d1[:, None] * _prod_except(Y, k)
    G[:, 0, 1] += lead * dYr[:, 0]
    G[:, 0, ell] -= lead * dYr[:, -1]
    for i in range(1, ell - 1):
        G[:, i, 1] += z[i] * dYr[:, 0]
        G[:, i, ell] += (z[0] - z[i]) * dYr[:, -1]
        G[:, i, i + 1] -= z[0] * dYr[:, i]
    return G


def euler_terms(a, b, zk, r):
    k = zk.shape[0]
    lin = a[:, None] * zk[None, :] + b[:, None]
    ar = _ipow(a, r)
    prod = np.prod(lin, axis=1) if k else np.ones_like(a)
    F = ar * prod
    if k:
        rest = _prod_except(lin, k)
        Fa = r * _ipow(a, r - 1) * prod + ar * (rest * zk[None, :]).sum(axis=1)
        Fb = ar * rest.sum(axis=1)
    else:
        Fa = r * _ipow(a, r - 1) * prod
        Fb = np.zeros_like(a)
    return F, Fa, Fb
