"""Induced arrangements A^Y on flats and their identification as some A^k_m(r)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import lcm
from typing import Sequence

import numpy as np

from .arrangement import Arrangement, Hyperplane, build_Akl, build_monomial_reflection
from .cyclotomic import CycloMatrix, CycloNum, cyclotomic_field, reduce_vector, rref
from .errors import InvalidParameterError
from .lattice import Flat, characteristic_polynomial, flat_of, intersection_lattice

__all__ = [
    "RestrictionResult",
    "restrict",
    "default_chart",
    "identify_monomial_type",
    "find_linear_isomorphism",
    "ScanRow",
    "ScanResult",
    "restriction_table",
    "restriction_closure_scan",
]

# exact isomorphism search is attempted only below these sizes
SEARCH_MAX_DIM = 3
SEARCH_MAX_HYPERPLANES = 12


@dataclass(frozen=True)
class RestrictionResult:
    induced: Arrangement
    chart: CycloMatrix
    candidates: tuple[tuple[int, int, int], ...] = ()
    # for each induced hyperplane, the indices of the hyperplanes of A tracing onto it
    sources: tuple[tuple[int, ...], ...] = field(default=(), compare=False)


def default_chart(A: Arrangement, Y: Flat) -> CycloMatrix:
    """Basis of Y parametrized by the free (non-pivot) coordinates of its rref forms."""
    F = A.field
    free = [j for j in range(A.dim) if j not in Y.pivots]
    rows = []
    for f in free:
        v = [F.zero] * A.dim
        v[f] = F.one
        for row, p in zip(Y.basis, Y.pivots):
            if row[f]:
                v[p] = -row[f]
        rows.append(v)
    return CycloMatrix(rows, F, A.dim)


def _check_flat(A: Arrangement, Y: Flat) -> None:
    if Y.rank == 0:
        raise InvalidParameterError("restriction to the ambient space is not an induced arrangement")
    if any(not 0 <= i < len(A) for i in Y.containing) or not Y.containing:
        raise InvalidParameterError("flat does not belong to this arrangement")
    expected = flat_of(A, Y.containing)
    if expected.basis != Y.basis or expected.containing != Y.containing:
        raise InvalidParameterError("flat does not belong to this arrangement")
    if Y.dim(A.dim) == 0:
        raise InvalidParameterError("cannot restrict to the zero flat")


def restrict(A: Arrangement, Y: Flat, chart: CycloMatrix | None = None,
             r_max: int | None = None) -> RestrictionResult:
    """Traces on Y of the hyperplanes of A not containing Y, in the coordinates of ``chart``.

    With ``r_max`` set, the result also carries the identified (k, m, r) types.
    """
    _check_flat(A, Y)
    m = Y.dim(A.dim)
    if chart is None:
        chart = default_chart(A, Y)
    else:
        if chart.shape != (m, A.dim) or chart.field != A.field:
            raise InvalidParameterError(f"chart must be a {m}x{A.dim} matrix over the arrangement field")
        if len(rref(chart.rows)[1]) != m:
            raise InvalidParameterError("chart rows are not independent")
        for v in chart.rows:
            for form in Y.basis:
                if _dot(form, v):
                    raise InvalidParameterError("chart row does not lie in the flat")
    inside = set(Y.containing)
    covs: list[tuple] = []
    sources: list[list[int]] = []
    where: dict[tuple, int] = {}
    for i, h in enumerate(A.hyperplanes):
        if i in inside:
            continue
        trace = Hyperplane(tuple(_dot(h.covector, v) for v in chart.rows)).covector
        j = where.get(trace)
        if j is None:
            where[trace] = len(covs)
            covs.append(trace)
            sources.append([i])
        else:
            sources[j].append(i)
    label = f"{A.label}^[{','.join(map(str, Y.containing))}]"
    induced = Arrangement.from_covectors(covs, m, A.field, label)
    cands = tuple(identify_monomial_type(induced, r_max)) if r_max is not None else ()
    return RestrictionResult(induced, chart, cands, tuple(tuple(s) for s in sources))


def _dot(c: Sequence[CycloNum], v: Sequence[CycloNum]) -> CycloNum:
    acc = c[0].field.zero
    for x, y in zip(c, v):
        if x and y:
            acc = acc + x * y
    return acc


# -- identification ------------------------------------------------------

def identify_monomial_type(B: Arrangement, r_max: int) -> list[tuple[int, int, int]]:
    """All (k, m, r), r <= r_max, whose A^k_m(r) matches B.

    Matching means equal hyperplane count and characteristic polynomial, and,
    for m <= 3 with at most 12 hyperplanes, an exact linear isomorphism.
    """
    return list(_identify(B, r_max))


@lru_cache(maxsize=4096)
def _identify(B: Arrangement, r_max: int) -> tuple[tuple[int, int, int], ...]:
    m = B.dim
    if m < 2:
        return ()
    chi = characteristic_polynomial(B)
    found = []
    for r in range(1, r_max + 1):
        for k in range(m + 1):
            A = build_Akl(k, m, r)
            if len(A) != len(B) or characteristic_polynomial(A) != chi:
                continue
            if m <= SEARCH_MAX_DIM and len(B) <= SEARCH_MAX_HYPERPLANES:
                if find_linear_isomorphism(B, A) is None:
                    continue
            found.append((k, m, r))
    return tuple(sorted(found))


def _independent_indices(rows) -> list[int]:
    basis, pivots, chosen = (), (), []
    for i, v in enumerate(rows):
        if any(reduce_vector(basis, pivots, v)):
            basis, pivots = rref(basis + (tuple(v),))
            chosen.append(i)
    return chosen


def _coords(basis_rows, v):
    """Exact coefficients x with sum x_s * basis_rows[s] == v (basis rows independent)."""
    rho = len(basis_rows)
    F = v[0].field
    # columns are basis vectors; augmented column is v
    system = [[basis_rows[s][j] for s in range(rho)] + [v[j]] for j in range(len(v))]
    red, piv = rref(system)
    if rho in piv:
        raise InvalidParameterError("vector not in span")
    x = [F.zero] * rho
    for row, p in zip(red, piv):
        x[p] = row[rho]
    return x


class _Scales:
    """Unknown scalars lambda_s tracked as ratios to a component root (weighted union-find)."""

    def __init__(self, n: int, one):
        self.root = list(range(n))
        self.rel = [one] * n

    def copy(self) -> "_Scales":
        s = _Scales.__new__(_Scales)
        s.root, s.rel = list(self.root), list(self.rel)
        return s

    def impose(self, support, targets, same) -> bool:
        """Require lambda_s proportional to targets[s] over the support; False if inconsistent."""
        per_root: dict[int, object] = {}
        for s in support:
            q = targets[s] / self.rel[s]
            rt = self.root[s]
            if rt in per_root:
                if not same(per_root[rt], q):
                    return False
            else:
                per_root[rt] = q
        roots = list(per_root)
        base = per_root[roots[0]]
        for rt in roots[1:]:
            factor = per_root[rt] / base
            for x in range(len(self.root)):
                if self.root[x] == rt:
                    self.root[x] = roots[0]
                    self.rel[x] = self.rel[x] * factor
        return True

    def values(self):
        return [self.rel[s] for s in range(len(self.rel))]


def _float_match(Cf, Df, I, J, order, tol=1e-9):
    """Backtracking search for a bijection and diagonal scaling, in floating point."""
    n, rho = Cf.shape
    supp_c = np.abs(Cf) > tol * np.abs(Cf).max(axis=1, keepdims=True)
    supp_d = np.abs(Df) > tol * np.abs(Df).max(axis=1, keepdims=True)
    same = lambda a, b: abs(a - b) <= 1e-7 * max(abs(a), abs(b))
    perm = {I[s]: J[s] for s in range(rho)}
    used = set(J)

    def rec(pos: int, scales: _Scales):
        if pos == len(order):
            return dict(perm)
        b = order[pos]
        sb = supp_c[b]
        for a in range(n):
            if a in used or not np.array_equal(sb, supp_d[a]):
                continue
            support = np.flatnonzero(sb)
            targets = {s: Df[a, s] / Cf[b, s] for s in support}
            trial = scales.copy()
            if not trial.impose(support, targets, same):
                continue
            perm[b] = a
            used.add(a)
            out = rec(pos + 1, trial)
            if out is not None:
                return out
            del perm[b]
            used.discard(a)
        return None

    return rec(0, _Scales(rho, 1.0 + 0j))


def find_linear_isomorphism(B: Arrangement, A: Arrangement):
    """An exact linear map T with x -> x T sending each covector of B to a multiple of one of A.

    Returns ``(T, perm)`` with ``perm[b]`` the index in A matched to hyperplane b of B,
    or None when no isomorphism exists. Candidate matchings are found in floating
    point; every returned map is verified in exact arithmetic.
    """
    if B.dim != A.dim or len(B) != len(A):
        return None
    F = cyclotomic_field(lcm(B.field.order, A.field.order))
    Bl, Al = B.lift(F), A.lift(F)
    bc, ac = Bl.covectors(), Al.covectors()
    n, m = len(bc), B.dim
    if n == 0:
        return CycloMatrix.identity(m, F), ()
    I = _independent_indices(bc)
    rho = len(I)
    if len(_independent_indices(ac)) != rho:
        return None
    Bf, Af = Bl.covector_matrix(), Al.covector_matrix()
    Cf = np.linalg.lstsq(Bf[I].T, Bf.T, rcond=None)[0].T
    rest = [b for b in range(n) if b not in I]
    supp = (np.abs(Cf) > 1e-9).sum(axis=1)
    order = sorted(rest, key=lambda b: -supp[b])
    for J in itertools.permutations(range(n), rho):
        AJ = Af[list(J)]
        sv = np.linalg.svd(AJ, compute_uv=False)
        if sv[-1] < 1e-9 * sv[0]:
            continue
        Df, *_ = np.linalg.lstsq(AJ.T, Af.T, rcond=None)
        Df = Df.T
        perm = _float_match(Cf, Df, I, list(J), order)
        if perm is None:
            continue
        cert = _certify(bc, ac, I, list(J), perm, F, m)
        if cert is not None:
            return cert, tuple(perm[b] for b in range(n))
    return None


def _certify(bc, ac, I, J, perm, F, m):
    rho = len(I)
    bI = [bc[i] for i in I]
    aJ = [ac[j] for j in J]
    scales = _Scales(rho, F.one)
    for b in range(len(bc)):
        if b in I:
            continue
        c = _coords(bI, bc[b])
        d = _coords(aJ, ac[perm[b]])
        support = [s for s in range(rho) if c[s]]
        if support != [s for s in range(rho) if d[s]]:
            return None
        if not scales.impose(support, {s: d[s] / c[s] for s in support}, lambda x, y: x == y):
            return None
    lam = scales.values()
    # complete both row sets to bases of the dual space with unit vectors
    units = [[F.one if j == i else F.zero for j in range(m)] for i in range(m)]
    src = [list(v) for v in bI]
    dst = [[lam[s] * x for x in aJ[s]] for s in range(rho)]
    for rows in (src, dst):
        for u in units:
            if len(rows) == m:
                break
            if len(rref(rows + [u])[1]) > len(rows):
                rows.append(u)
    T = CycloMatrix(src, F, m).inverse() @ CycloMatrix(dst, F, m)
    for b, a in perm.items():
        image = (CycloMatrix([bc[b]], F, m) @ T).rows[0]
        if not any(image) or Hyperplane(image).covector != ac[a]:
            return None
    return T


# -- closure scan -----------------------------------------------------------

@dataclass(frozen=True)
class ScanRow:
    flat: tuple[int, ...]
    dim: int
    induced_count: int
    candidates: tuple[tuple[int, int, int], ...]

    @property
    def identified(self) -> bool:
        return bool(self.candidates)

    def line(self) -> str:
        cands = ",".join(f"({k},{m},{r})" for k, m, r in self.candidates)
        return (
            f"flat=[{','.join(map(str, self.flat))}] dim={self.dim} "
            f"induced_count={self.induced_count} candidates=[{cands}]"
        )


@dataclass(frozen=True)
class ScanResult:
    group: tuple[int, int, int]
    rows: tuple[ScanRow, ...]

    @property
    def failures(self) -> list[ScanRow]:
        return [row for row in self.rows if not row.identified]

    @property
    def ok(self) -> bool:
        return not self.failures


def restriction_table(A: Arrangement, r_max: int, min_dim: int = 2) -> tuple[ScanRow, ...]:
    """One row per flat of dimension >= ``min_dim``, sorted by (-dim, flat); rank 0 is A itself."""
    rows = []
    for Y in intersection_lattice(A).flats:
        m = Y.dim(A.dim)
        if m < min_dim:
            continue
        induced = A if Y.rank == 0 else restrict(A, Y).induced
        rows.append(ScanRow(Y.containing, m, len(induced), tuple(identify_monomial_type(induced, r_max))))
    rows.sort(key=lambda row: (-row.dim, row.flat))
    return tuple(rows)


def restriction_closure_scan(r: int, p: int, ell: int, r_max: int | None = None) -> ScanResult:
    """Restrict A(G(r,p,l)) to every flat of dimension >= 2 and identify each result.

    The ambient space is included as the trivial entry (the arrangement itself).
    """
    A = build_monomial_reflection(r, p, ell)
    return ScanResult((r, p, ell), restriction_table(A, r if r_max is None else r_max))
