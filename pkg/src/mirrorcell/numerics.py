"""Small numeric helpers: seeded generators, companion-matrix roots, point separation."""
from __future__ import annotations

import numpy as np

DEFAULT_SEED = 20240607


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by ``seed`` and a stream path of non-negative ints."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


def unit_disk(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform draws from the closed unit disk in C."""
    rad = np.sqrt(rng.random(size))
    ang = rng.random(size) * 2 * np.pi
    return rad * np.exp(1j * ang)


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def companion_roots(coeffs) -> np.ndarray:
    """Roots of sum(coeffs[i] * x**i) (constant term first) as companion-matrix eigenvalues.

    Leading coefficients that are exactly zero are dropped first.
    """
    c = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise ValueError("zero polynomial has no finite root set")
    c = c[: nz[-1] + 1]
    deg = c.size - 1
    if deg == 0:
        return np.empty(0, dtype=complex)
    comp = np.zeros((deg, deg), dtype=complex)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(comp)


def poly_from_roots(roots) -> np.ndarray:
    """Monic polynomial with the given roots, constant term first."""
    out = np.array([1.0 + 0j])
    for x in roots:
        out = np.concatenate([[0j], out]) - x * np.concatenate([out, [0j]])
    return out


def projective_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Sine of the angle between the complex lines spanned by u and v."""
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    c = abs(np.vdot(u, v)) / (nu * nv)
    return float(np.sqrt(max(0.0, 1.0 - c * c)))


def min_projective_separation(points: np.ndarray) -> float:
    n = len(points)
    if n < 2:
        return np.inf
    U = points / np.linalg.norm(points, axis=1, keepdims=True)
    G = np.abs(U.conj() @ U.T)
    np.fill_diagonal(G, 0.0)
    return float(np.sqrt(max(0.0, 1.0 - G.max() ** 2)))


def min_affine_separation(points: np.ndarray) -> float:
    n = len(points)
    if n < 2:
        return np.inf
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    d[np.diag_indices(n)] = np.inf
    return float(d.min())
