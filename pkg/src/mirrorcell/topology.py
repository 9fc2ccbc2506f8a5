"""Closed-form fiber invariants (genus, punctures, free rank) and an independent l = 2 oracle."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import InvalidParameterError, OracleInconclusiveError, VerificationError
from .fibration import BasePoint, FibrationParams, enumerate_infinity_points, sample_base_point
from .numerics import DEFAULT_SEED, companion_roots, make_rng, unit_disk

__all__ = [
    "genus",
    "puncture_count",
    "free_rank",
    "free_rank_product_form",
    "free_rank_minus_one_variant",
    "multidegree",
    "Pi1Structure",
    "pi1_structure",
    "riemann_hurwitz_oracle",
    "Check",
    "TopologyReport",
    "report",
]


def _canonical_degree(p: FibrationParams) -> int:
    """2g - 2 of the closed fiber."""
    return (p.k + (p.r - 1) * (p.ell - 1) - 2) * p.bezout


def genus(params: FibrationParams) -> int:
    two_g_minus_2 = _canonical_degree(params)
    if two_g_minus_2 % 2 or two_g_minus_2 < -2:
        raise VerificationError(f"2g-2 = {two_g_minus_2} is not an admissible canonical degree")
    return 1 + two_g_minus_2 // 2


def puncture_count(params: FibrationParams) -> int:
    return params.bezout


def free_rank(params: FibrationParams) -> int:
    """Rank of pi_1 of the open fiber, 2g + P - 1."""
    return 2 * genus(params) + puncture_count(params) - 1


def free_rank_product_form(params: FibrationParams) -> int:
    """(k + (r-1)(l-1) - 1)(k+r) r^(l-2) + 1, equal to 2g + P - 1."""
    p = params
    return (p.k + (p.r - 1) * (p.ell - 1) - 1) * p.bezout + 1


def free_rank_minus_one_variant(params: FibrationParams) -> int:
    """The same product with -1 in place of +1; disagrees with 2g + P - 1 by two."""
    p = params
    return (p.k + (p.r - 1) * (p.ell - 1) - 1) * p.bezout - 1


def multidegree(params: FibrationParams) -> tuple[int, ...]:
    return (params.k + params.r,) + (params.r,) * (params.ell - 2)


@dataclass(frozen=True)
class Pi1Structure:
    """pi_1(X(A)) as a split extension of the braid group B_l by the free group F_N."""

    free_rank: int
    braid_strands: int
    split: bool = True

    def __str__(self) -> str:
        return f"F_{self.free_rank} ⋊ B_{self.braid_strands}"

    def to_dict(self) -> dict:
        return {
            "descriptor": str(self),
            "fiber_group": {"type": "free", "rank": self.free_rank},
            "base_group": {"type": "braid", "strands": self.braid_strands},
            "extension": "split" if self.split else "unknown",
        }


def pi1_structure(params: FibrationParams) -> Pi1Structure:
    return Pi1Structure(free_rank(params), params.ell)


# -- Riemann-Hurwitz oracle ---------------------------------------------------

def _pmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), dtype=complex)
    for i, j in zip(*np.nonzero(a)):
        out[i:i + b.shape[0], j:j + b.shape[1]] += a[i, j] * b
    return out


def _padd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1])), dtype=complex)
    out[: a.shape[0], : a.shape[1]] += a
    out[: b.shape[0], : b.shape[1]] += b
    return out


def _ppow(a: np.ndarray, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = _pmul(out, a)
    return out


def _sheared_curve(params: FibrationParams, z1: complex, c: complex) -> np.ndarray:
    """G[i, j], coefficient of u^i w^j, for the curve in coordinates y1 = u, y2 = w - c u."""
    y1 = np.array([[0, 0], [1, 0]], dtype=complex)
    y2 = np.array([[0, 1], [-c, 0]], dtype=complex)
    lead = np.ones((1, 1), dtype=complex)
    for a in range(params.k):
        lead = _pmul(lead, (y1, y2)[a])
    G = _pmul(lead, _padd(_ppow(y1, params.r), -_ppow(y2, params.r)))
    return _padd(G, np.array([[-z1]], dtype=complex))


def _sylvester_det(p: np.ndarray, q: np.ndarray) -> complex:
    """Resultant of p and q (coefficients constant term first, formal degrees len-1)."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    if size == 0:
        return 1.0 + 0j
    S = np.zeros((size, size), dtype=complex)
    for i in range(n):
        S[i, i:i + m + 1] = p[::-1]
    for i in range(m):
        S[n + i, i:i + n + 1] = q[::-1]
    return np.linalg.det(S)


def _cluster_count(values: np.ndarray, tol: float) -> int:
    n = len(values)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol * max(1.0, abs(values[i])):
                parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


def _polish(G: np.ndarray, Gu: np.ndarray, w0: complex) -> tuple[complex, complex]:
    """Newton on (G, dG/du) = 0 starting at w0 and the u-root of G(., w0) where dG/du is smallest."""
    Gw = npoly.polyder(G, axis=1)
    Guu = npoly.polyder(Gu, axis=0)
    Guw = npoly.polyder(Gu, axis=1)
    us = companion_roots(npoly.polyval(w0, G.T))
    u = us[np.argmin(np.abs(npoly.polyval2d(us, np.full_like(us, w0), Gu)))]
    w = w0
    for _ in range(60):
        f = np.array([npoly.polyval2d(u, w, G), npoly.polyval2d(u, w, Gu)])
        J = np.array([
            [npoly.polyval2d(u, w, Gu), npoly.polyval2d(u, w, Gw)],
            [npoly.polyval2d(u, w, Guu), npoly.polyval2d(u, w, Guw)],
        ])
        try:
            du, dw = np.linalg.solve(J, f)
        except np.linalg.LinAlgError:
            break
        u, w = u - du, w - dw
        if abs(du) + abs(dw) < 1e-15 * (1 + abs(u) + abs(w)):
            break
    return u, w


def riemann_hurwitz_oracle(params: FibrationParams, z, seed: int = 0,
                           separation: float = 1e-8) -> tuple[int, int, int]:
    """(g, P, N) for l = 2 from a branched-cover Euler characteristic count.

    The fiber (y_1 ... y_k)(y_1^r - y_2^r) = z_1 is projected to a line after a
    random shear (y1, y2) = (u, w - c u), which makes the projection finite of
    degree d = k + r. With s special values (zeros of the u-discriminant) and
    n_j distinct preimages over each, chi = d (1 - s) + sum n_j and N = 1 - chi.
    P is the verified count of points at infinity and g = (N + 1 - P) / 2.
    """
    if params.ell != 2 or params.k > 3 or params.r > 4:
        raise InvalidParameterError("oracle needs l = 2, k <= 3, r <= 4")
    z = z if isinstance(z, BasePoint) else BasePoint(z)
    z1 = complex(z.z[0])
    d = params.k + params.r
    rng = make_rng(seed, 5, params.k, params.r)
    while True:
        c = 0.5 * unit_disk(rng, 1)[0] + 0.25
        G = _sheared_curve(params, z1, c)
        if abs(G[d, 0]) > 1e-3:
            break
    Gu = npoly.polyder(G, axis=0)

    # discriminant in w by interpolation on the unit circle
    bound = d * (d - 1)
    M = 1 << int(np.ceil(np.log2(bound + 2)))
    ws = np.exp(2j * np.pi * np.arange(M) / M)
    vals = np.array([_sylvester_det(npoly.polyval(w, G.T), npoly.polyval(w, Gu.T)) for w in ws])
    coeffs = np.fft.fft(vals) / M
    coeffs[bound + 1:] = 0
    scale = np.abs(coeffs).max()
    coeffs[np.abs(coeffs) < 1e-10 * scale] = 0
    raw = companion_roots(coeffs) if np.count_nonzero(coeffs[1:]) else np.empty(0)

    special = np.array([_polish(G, Gu, w0)[1] for w0 in raw])
    for i in range(len(special)):
        for j in range(i + 1, len(special)):
            if abs(special[i] - special[j]) < separation:
                raise OracleInconclusiveError(
                    f"branch values {special[i]:.6g} and {special[j]:.6g} coincide; resample z"
                )
    chi = d
    for w in special:
        us = companion_roots(npoly.polyval(w, G.T))
        chi += _cluster_count(us, 1e-6) - d
    N = 1 - chi
    P = len(enumerate_infinity_points(z, params))
    if (N + 1 - P) % 2 or N + 1 - P < 0:
        raise VerificationError(f"oracle found N={N}, P={P}: no admissible genus")
    return (N + 1 - P) // 2, P, N


# -- report -------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class TopologyReport:
    params: FibrationParams
    genus: int
    punctures: int
    free_rank: int
    multidegree: tuple[int, ...]
    bezout: int
    pi1_structure: Pi1Structure
    checks: tuple[Check, ...]
    notes: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "k": self.params.k,
            "l": self.params.ell,
            "r": self.params.r,
            "genus": self.genus,
            "punctures": self.punctures,
            "free_rank": self.free_rank,
            "bezout": self.bezout,
            "multidegree": list(self.multidegree),
            "pi1": self.pi1_structure.to_dict(),
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
            "pass": self.ok,
        }


def report(params: FibrationParams, z=None, seed: int = DEFAULT_SEED) -> TopologyReport:
    """Assemble the invariants and every named cross-check; failures are recorded, not raised."""
    p = params
    if z is None:
        z = sample_base_point(p.ell, seed)
    checks = []
    two_g_minus_2 = _canonical_degree(p)
    parity_ok = two_g_minus_2 % 2 == 0 and two_g_minus_2 >= -2
    checks.append(Check("canonical_degree_parity", parity_ok, f"2g-2 = {two_g_minus_2}"))
    g = 1 + two_g_minus_2 // 2
    P = puncture_count(p)
    N = 2 * g + P - 1
    md = multidegree(p)
    prod_md = int(np.prod(md))
    checks.append(Check("multidegree_adjunction", two_g_minus_2 == (sum(md) - p.ell - 1) * prod_md,
                        f"(sum d - l - 1) prod d = {(sum(md) - p.ell - 1) * prod_md}"))
    two_counts = p.k * p.r ** (p.ell - 2) + p.r ** (p.ell - 1)
    checks.append(Check("bezout_equals_infinity_formula", P == two_counts,
                        f"(k+r) r^(l-2) = {P}, k r^(l-2) + r^(l-1) = {two_counts}"))
    checks.append(Check("free_rank_product_form", N == free_rank_product_form(p),
                        f"2g+P-1 = {N}, product form = {free_rank_product_form(p)}"))
    try:
        n_inf = len(enumerate_infinity_points(z, p))
        checks.append(Check("infinity_count", n_inf == P, f"enumerated {n_inf}, expected {P}"))
    except VerificationError as exc:
        checks.append(Check("infinity_count", False, str(exc)))
    if p.ell == 2 and p.k <= 3 and p.r <= 4:
        try:
            og, oP, oN = riemann_hurwitz_oracle(p, z, seed=seed)
            checks.append(Check("riemann_hurwitz_oracle", (og, oP, oN) == (g, P, N),
                                f"oracle (g, P, N) = ({og}, {oP}, {oN})"))
        except (VerificationError, OracleInconclusiveError) as exc:
            checks.append(Check("riemann_hurwitz_oracle", False, str(exc)))
    notes = (
        f"the expanded free-rank expression with a trailing -1 gives "
        f"{free_rank_minus_one_variant(p)}; reported N uses 2g + P - 1 = {N}",
    )
    return TopologyReport(p, g, P, N, md, p.bezout, Pi1Structure(N, p.ell), tuple(checks), notes)
