"""Numerical verification of the fibration f: X(A^k_l(r)) -> X(A_{l-1}).

Coordinates: y_1..y_l upstairs, z_1..z_{l-1} on the base with z_l = 0, and
f(y)_i = (y_1 ... y_k) (y_i^r - y_l^r). The fiber over z is the affine curve
cut out by f(y) = z; its closure in P^l adds the coordinate y_0 with y_0 = 0
the hyperplane at infinity. Indices in this module are 0-based internally and
1-based in anything user facing (family tags, section indices).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .arrangement import build_Akl, build_braid
from .errors import InvalidParameterError, SamplingError, VerificationError
from .numerics import (
    companion_roots,
    complex_normal,
    make_rng,
    min_affine_separation,
    min_projective_separation,
    poly_from_roots,
    unit_disk,
)

__all__ = [
    "RESIDUAL_TOL",
    "RANK_RATIO_TOL",
    "SEPARATION_TOL",
    "FibrationParams",
    "BasePoint",
    "FiberSample",
    "InfinityPoint",
    "map_f",
    "sample_base_point",
    "sample_fiber_points",
    "jacobian_ratios",
    "jacobian_report",
    "enumerate_infinity_points",
    "transversality_at_infinity",
    "coordinate_section_points",
    "coordinate_section_count",
    "euler_identity_check",
    "preimage_union_check",
    "preimage_union_report",
    "verification_report",
]

RESIDUAL_TOL = 1e-9
RANK_RATIO_TOL = 1e-6
SEPARATION_TOL = 1e-6
BRANCH_TOL = 1e-6
BASE_MARGIN = 0.1
WALL_MARGIN = 1e-3


@dataclass(frozen=True)
class FibrationParams:
    k: int
    ell: int
    r: int

    def __post_init__(self):
        if self.ell < 2:
            raise InvalidParameterError(f"need l >= 2, got l={self.ell}")
        if not 0 <= self.k <= self.ell:
            raise InvalidParameterError(f"need 0 <= k <= l, got k={self.k}, l={self.ell}")
        if self.r < 1:
            raise InvalidParameterError(f"need r >= 1, got r={self.r}")

    @property
    def bezout(self) -> int:
        return (self.k + self.r) * self.r ** (self.ell - 2)

    def arrangement(self):
        return build_Akl(self.k, self.ell, self.r)

    def __str__(self) -> str:
        return f"(k={self.k}, l={self.ell}, r={self.r})"


@dataclass(frozen=True, eq=False)
class BasePoint:
    """A point z of X(A_{l-1}); the trailing coordinate z_l = 0 is implicit."""

    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex).reshape(-1)
        if z.size < 1:
            raise InvalidParameterError("base point needs at least one coordinate")
        object.__setattr__(self, "z", z)
        if self.margin() <= 0:
            raise InvalidParameterError(f"base point {z} lies on the braid arrangement")

    @property
    def ell(self) -> int:
        return self.z.size + 1

    def margin(self) -> float:
        """Smallest of |z_i| and |z_i - z_j|."""
        zz = np.append(self.z, 0)
        d = np.abs(zz[:, None] - zz[None, :])
        d[np.diag_indices(zz.size)] = np.inf
        return float(d.min())

    def extended(self) -> np.ndarray:
        return np.append(self.z, 0)


def _as_base(z) -> BasePoint:
    return z if isinstance(z, BasePoint) else BasePoint(z)


def _check(z: BasePoint, params: FibrationParams) -> None:
    if z.ell != params.ell:
        raise InvalidParameterError(f"base point has l={z.ell}, parameters have l={params.ell}")


@dataclass(frozen=True, eq=False)
class FiberSample:
    y: np.ndarray
    residual: float
    min_hyperplane_distance: float
    jacobian_ratio: float


@dataclass(frozen=True, eq=False)
class InfinityPoint:
    """Homogeneous point (y0 = 0, y1..yl) of the closed fiber on the hyperplane at infinity."""

    coords: np.ndarray
    family: str


def map_f(y, params: FibrationParams) -> np.ndarray:
    """z_i = (y_1 ... y_k)(y_i^r - y_l^r); accepts one point or an (n, l) batch."""
    Y = np.asarray(y, dtype=complex)
    single = Y.ndim == 1
    Z = kernels.map_f(np.atleast_2d(Y), params.k, params.r)
    return Z[0] if single else Z


def sample_base_point(ell: int, seed: int = 0, margin: float = BASE_MARGIN) -> BasePoint:
    """Rejection-sample z in the unit disk with all |z_i|, |z_i - z_j| >= margin."""
    if ell < 2:
        raise InvalidParameterError(f"need l >= 2, got l={ell}")
    rng = make_rng(seed, 0, ell)
    while True:
        zz = np.append(unit_disk(rng, ell - 1), 0)
        gaps = np.abs(zz[:, None] - zz[None, :])[np.triu_indices(ell, 1)]
        if gaps.min() >= margin:
            return BasePoint(zz[:-1])


@lru_cache(maxsize=None)
def _covector_matrix(k: int, ell: int, r: int) -> np.ndarray:
    return build_Akl(k, ell, r).covector_matrix()


@lru_cache(maxsize=None)
def _braid_matrix(ell: int) -> np.ndarray:
    return build_braid(ell).covector_matrix()


def _roots_of_unity(r: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(r) / r)


def jacobian_ratios(Y: np.ndarray, params: FibrationParams) -> np.ndarray:
    """sigma_min / sigma_max of the Jacobian of f at each row of Y (1 for a nonzero single row)."""
    J = kernels.jacobian(np.atleast_2d(Y), params.k, params.r)
    if params.ell == 2:
        return (np.abs(J[:, 0, :]).max(axis=1) > 0).astype(float)
    sv = np.linalg.svd(J, compute_uv=False)
    return sv[:, -1] / sv[:, 0]


def jacobian_report(sample: FiberSample, params: FibrationParams) -> float:
    return float(jacobian_ratios(sample.y[None, :], params)[0])


def _draw_fiber_point(rng, zz: np.ndarray, params: FibrationParams):
    """One candidate point of the fiber, or None when a branch test fails."""
    k, ell, r = params.k, params.ell, params.r
    if k == 0:
        # with no coordinate factors the product constraint reads a = 1
        a = 1.0 + 0j
        b = 1.5 * unit_disk(rng, 1)[0]
    else:
        a = (0.5 + rng.random()) * np.exp(2j * np.pi * rng.random())
        # a^r * prod_{i<=k} (a z_i + b) = 1, a degree-k polynomial in b
        coeffs = poly_from_roots(-a * zz[:k])
        coeffs[0] -= a ** (-r)
        roots = companion_roots(coeffs)
        b = roots[rng.integers(roots.size)]
    Yv = a * zz + b
    if np.abs(Yv).min() < BRANCH_TOL:
        return None
    y = Yv ** (1.0 / r) * _roots_of_unity(r)[rng.integers(r, size=ell)]
    if k:
        # pin y_k so that y_1 ... y_k = 1/a exactly
        y[k - 1] = (1.0 / a) / np.prod(y[: k - 1])
        if abs(y[k - 1] ** r - Yv[k - 1]) > RESIDUAL_TOL * max(1.0, abs(Yv[k - 1])):
            return None
    return y


def sample_fiber_points(z, params: FibrationParams, count: int, seed: int = 0) -> list[FiberSample]:
    """Points of the fiber over z via the (a, b) parametrization Y_i = y_i^r = a z_i + b."""
    z = _as_base(z)
    _check(z, params)
    zz = z.extended()
    rng = make_rng(seed, 1, params.k, params.ell, params.r)
    pts = []
    attempts = 0
    while len(pts) < count:
        attempts += 1
        if attempts > 100 * max(count, 1):
            raise SamplingError(f"could not sample {count} fiber points for {params} at z={z.z}")
        y = _draw_fiber_point(rng, zz, params)
        if y is None:
            continue
        if kernels.fiber_residual(y[None, :], z.z, params.k, params.r)[0] > RESIDUAL_TOL:
            continue
        pts.append(y)
    if not pts:
        return []
    Y = np.array(pts)
    res = kernels.fiber_residual(Y, z.z, params.k, params.r)
    dist = kernels.min_abs_forms(Y, _covector_matrix(params.k, params.ell, params.r))
    dist = dist / np.linalg.norm(Y, axis=1)
    ratios = jacobian_ratios(Y, params)
    return [FiberSample(Y[i], float(res[i]), float(dist[i]), float(ratios[i])) for i in range(len(Y))]


def _normalize_max(P: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(P), axis=1)
    return P / P[np.arange(len(P)), idx][:, None]


def enumerate_infinity_points(z, params: FibrationParams) -> list[InfinityPoint]:
    """The k r^(l-2) + r^(l-1) points of the closed fiber at infinity, verified.

    Family ``coordinate(i)`` (i <= k): y_i = 0 and y_j^r = z_j - z_i; family
    ``diagonal``: every y_j an r-th root of unity. Both are taken modulo a
    common r-th root of unity by pinning one coordinate's branch.
    """
    z = _as_base(z)
    _check(z, params)
    k, ell, r = params.k, params.ell, params.r
    zz = z.extended()
    w = _roots_of_unity(r)
    pts: list[InfinityPoint] = []
    for i in range(k):
        pinned = ell - 1 if i != ell - 1 else ell - 2
        free = [j for j in range(ell) if j not in (i, pinned)]
        base = (zz - zz[i]) ** (1.0 / r)
        base[i] = 0
        for combo in itertools.product(range(r), repeat=len(free)):
            y = base.copy()
            for j, t in zip(free, combo):
                y[j] *= w[t]
            pts.append(InfinityPoint(np.concatenate([[0j], y]), f"coordinate({i + 1})"))
    for combo in itertools.product(range(r), repeat=ell - 1):
        y = np.ones(ell, dtype=complex)
        y[:-1] = w[list(combo)]
        pts.append(InfinityPoint(np.concatenate([[0j], y]), "diagonal"))
    P = np.array([p.coords for p in pts])
    res = kernels.homogeneous_residual(_normalize_max(P), z.z, k, r)
    if res.max() > RESIDUAL_TOL:
        raise VerificationError(f"point at infinity off the curve (residual {res.max():.3e}) for {params}")
    if np.any(P[:, 0] != 0):
        raise VerificationError("point at infinity with y0 != 0")
    sep = min_projective_separation(P)
    if sep <= SEPARATION_TOL:
        raise VerificationError(f"points at infinity not distinct (separation {sep:.3e}) for {params}")
    return pts


def _chart_index(coords: np.ndarray) -> int:
    mags = np.abs(coords[1:])
    top = mags.max()
    # ties go to the highest index
    return int(np.flatnonzero(mags >= top * (1 - 1e-12))[-1]) + 1


def transversality_at_infinity(p: InfinityPoint, z, params: FibrationParams,
                               tol: float = RANK_RATIO_TOL) -> bool:
    """Curve smooth at p with tangent not inside y0 = 0.

    In the chart y_j = 1 (|y_j| maximal) the gradients of the l-1 defining
    equations are stacked with the gradient of y0; the square matrix must have
    sigma_min / sigma_max above ``tol``.
    """
    z = _as_base(z)
    _check(z, params)
    j = _chart_index(p.coords)
    P = p.coords / p.coords[j]
    if kernels.homogeneous_residual(P[None, :], z.z, params.k, params.r)[0] > RESIDUAL_TOL:
        raise VerificationError("point is not on the closed fiber")
    G = kernels.homogeneous_gradients(P[None, :], z.z, params.k, params.r)[0]
    e0 = np.zeros(params.ell + 1, dtype=complex)
    e0[0] = 1
    M = np.delete(np.vstack([G, e0]), j, axis=1)
    sv = np.linalg.svd(M, compute_uv=False)
    return bool(sv[-1] > tol * sv[0])


def coordinate_section_points(z, params: FibrationParams, i: int) -> np.ndarray:
    """Homogeneous points of the closed fiber on y_i = 0, for k < i <= l (1-based).

    Built on y_l = 0: (y_1^r, ..., y_{l-1}^r) is proportional to (z_1, ..., z_{l-1});
    pinning y_{l-1} to the principal root of z_{l-1} leaves r^(l-2) branch
    choices, and y0^(k+r) = y_1 ... y_k leaves k+r choices of y0. Other i are
    reduced to i = l by swapping coordinates i and l, which replaces z by
    z'_m = z_{s(m)} - z_i.
    """
    z = _as_base(z)
    _check(z, params)
    k, ell, r = params.k, params.ell, params.r
    if not k < i <= ell:
        raise InvalidParameterError(f"section index must satisfy {k} < i <= {ell}, got {i}")
    zz = z.extended()
    swap = np.arange(ell)
    swap[i - 1], swap[ell - 1] = ell - 1, i - 1
    zp = (zz[swap] - zz[i - 1])[:-1]
    w = _roots_of_unity(r)
    base = zp ** (1.0 / r)
    d = k + r
    out = []
    for combo in itertools.product(range(r), repeat=ell - 2):
        y = np.zeros(ell, dtype=complex)
        y[: ell - 1] = base
        for m, t in enumerate(combo):
            y[m] *= w[t]
        lead = np.prod(y[:k]) if k else 1.0 + 0j
        for y0 in lead ** (1.0 / d) * np.exp(2j * np.pi * np.arange(d) / d):
            out.append(np.concatenate([[y0], y[swap]]))
    return np.array(out)


def coordinate_section_count(z, params: FibrationParams, i: int) -> int:
    """Verified number of distinct points of the closed fiber on y_i = 0; must be (k+r) r^(l-2)."""
    z = _as_base(z)
    P = coordinate_section_points(z, params, i)
    k, r = params.k, params.r
    res = kernels.homogeneous_residual(_normalize_max(P), z.z, k, r)
    if res.max() > RESIDUAL_TOL:
        raise VerificationError(f"section point off the closed fiber (residual {res.max():.3e})")
    if np.any(P[:, i] != 0) or np.any(P[:, 0] == 0):
        raise VerificationError("section point not on y_i = 0 in the affine part")
    Y = P[:, 1:] / P[:, :1]
    aff = kernels.fiber_residual(Y, z.z, k, r)
    if aff.max() > RESIDUAL_TOL:
        raise VerificationError(f"section point off the affine fiber (residual {aff.max():.3e})")
    sep = min_affine_separation(Y)
    if sep <= SEPARATION_TOL:
        raise VerificationError(f"section points not distinct (separation {sep:.3e})")
    if len(P) != params.bezout:
        raise VerificationError(f"found {len(P)} section points, expected {params.bezout}")
    return len(P)


def euler_identity_check(params: FibrationParams, z, trials: int = 50, seed: int = 0,
                         tol: float = RESIDUAL_TOL) -> bool:
    """a dF/da + b dF/db == deg F on F = 1, for F(a, b) = a^r prod_{i<=k} (a z_i + b).

    Also checks |grad F| >= deg F / (|a| + |b|), so the gradient never vanishes there.
    """
    z = _as_base(z)
    _check(z, params)
    k, r = params.k, params.r
    zk = z.extended()[:k]
    rng = make_rng(seed, 2, k, params.ell, r)
    a = np.empty(trials, dtype=complex)
    b = np.empty(trials, dtype=complex)
    for t in range(trials):
        if k == 0:
            a[t] = _roots_of_unity(r)[rng.integers(r)]
            b[t] = unit_disk(rng, 1)[0]
        else:
            a[t] = (0.5 + rng.random()) * np.exp(2j * np.pi * rng.random())
            coeffs = poly_from_roots(-a[t] * zk)
            coeffs[0] -= a[t] ** (-r)
            roots = companion_roots(coeffs)
            b[t] = roots[rng.integers(roots.size)]
    F, Fa, Fb = kernels.euler_terms(a, b, zk, r)
    d = k + r
    on_curve = np.abs(F - 1) <= tol
    euler = np.abs(a * Fa + b * Fb - d) <= tol
    grad = np.sqrt(np.abs(Fa) ** 2 + np.abs(Fb) ** 2)
    bounded = grad >= d / (np.abs(a) + np.abs(b)) * (1 - 1e-12)
    return bool(np.all(on_curve & euler & bounded))


def preimage_union_report(params: FibrationParams, trials: int = 200, seed: int = 0) -> dict:
    """Sampling check that f^-1(braid walls) is exactly the union of the hyperplanes of A.

    On-wall points cycle through the hyperplanes; off-wall points keep relative
    distance >= 1e-3 from every hyperplane. Off-wall images are measured after
    dividing out the common factor (y_1...y_k) max|y|^r.
    """
    k, ell, r = params.k, params.ell, params.r
    C = _covector_matrix(k, ell, r)
    braid = _braid_matrix(ell)
    rng = make_rng(seed, 3, k, ell, r)
    on = np.empty((trials, ell), dtype=complex)
    for t in range(trials):
        c = C[t % len(C)]
        w = complex_normal(rng, ell)
        on[t] = w - (c @ w) / np.vdot(c, c) * c.conj()
    on_vals = kernels.min_abs_forms(map_f(on, params), braid) if trials else np.zeros(0)

    off = []
    while len(off) < trials:
        y = complex_normal(rng, ell)
        if kernels.min_abs_forms(y[None, :], C)[0] / np.linalg.norm(y) >= WALL_MARGIN:
            off.append(y)
    off = np.array(off).reshape(trials, ell)
    if trials:
        lead = np.prod(off[:, :k], axis=1) if k else np.ones(trials)
        scale = np.abs(lead) * np.abs(off).max(axis=1) ** r
        off_vals = kernels.min_abs_forms(map_f(off, params), braid) / scale
    else:
        off_vals = np.full(0, np.inf)
    on_worst = float(on_vals.max()) if trials else 0.0
    off_worst = float(off_vals.min()) if trials else np.inf
    return {
        "on_wall": trials,
        "off_wall": trials,
        "max_on_wall_value": on_worst,
        "min_off_wall_margin": off_worst,
        "pass": bool(on_worst <= RESIDUAL_TOL and off_worst >= RESIDUAL_TOL),
    }


def preimage_union_check(params: FibrationParams, trials: int = 200, seed: int = 0) -> bool:
    return preimage_union_report(params, trials, seed)["pass"]


def _fmt(x: float) -> float:
    # fixed significant digits keep the JSON byte-stable
    return float(f"{x:.6e}")


def verification_report(params: FibrationParams, seed: int, samples: int = 100,
                        base_points: int = 3, preimage_trials: int = 200) -> dict:
    """Run every fiber check for one parameter triple; each entry carries a ``pass`` flag."""
    k, ell, r = params.k, params.ell, params.r
    bez = params.bezout
    out: dict = {"k": k, "l": ell, "r": r}
    try:
        n_samples, max_res, min_ratio, min_dist = 0, 0.0, np.inf, np.inf
        inf_counts, transversal, euler = [], True, True
        sections: dict[str, list[int]] = {str(i): [] for i in range(k + 1, ell + 1)}
        for b in range(base_points):
            z = sample_base_point(ell, make_rng(seed, 4, k, ell, r, b).integers(2**63))
            pts = sample_fiber_points(z, params, samples, seed=seed + b)
            n_samples += len(pts)
            max_res = max([max_res] + [p.residual for p in pts])
            min_ratio = min([min_ratio] + [p.jacobian_ratio for p in pts])
            min_dist = min([min_dist] + [p.min_hyperplane_distance for p in pts])
            inf = enumerate_infinity_points(z, params)
            inf_counts.append(len(inf))
            transversal &= all(transversality_at_infinity(p, z, params) for p in inf)
            for i in range(k + 1, ell + 1):
                sections[str(i)].append(coordinate_section_count(z, params, i))
            euler &= euler_identity_check(params, z, trials=50, seed=seed + b)
        pre = preimage_union_report(params, preimage_trials, seed)
        expected_inf = k * r ** (ell - 2) + r ** (ell - 1)
        out.update({
            "samples": {"value": n_samples, "required": samples * base_points,
                        "pass": n_samples == samples * base_points},
            "max_residual": {"value": _fmt(max_res), "tolerance": RESIDUAL_TOL,
                             "pass": bool(max_res <= RESIDUAL_TOL)},
            "min_jacobian_ratio": {"value": _fmt(min_ratio), "threshold": RANK_RATIO_TOL,
                                   "pass": bool(min_ratio > RANK_RATIO_TOL)},
            "min_hyperplane_distance": {"value": _fmt(min_dist), "pass": bool(min_dist > 0)},
            "infinity_count": {"value": inf_counts, "expected": expected_inf,
                               "pass": all(c == expected_inf for c in inf_counts)},
            "bezout": {"value": bez, "expected": expected_inf, "pass": bez == expected_inf},
            "transversality": {"value": transversal, "pass": transversal},
            "section_counts": {"value": sections, "expected": bez,
                               "pass": all(c == bez for v in sections.values() for c in v)},
            "euler_identity": {"value": euler, "pass": euler},
            "preimage_check": {"value": {key: (_fmt(v) if isinstance(v, float) else v)
                                         for key, v in pre.items() if key != "pass"},
                               "pass": pre["pass"]},
        })
        out["pass"] = all(v["pass"] for v in out.values() if isinstance(v, dict))
    except VerificationError as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
        out["pass"] = False
    return out
