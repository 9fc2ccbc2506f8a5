"""Intersection lattice, Moebius function and characteristic polynomial."""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Sequence

from .arrangement import Arrangement, Hyperplane
from .cyclotomic import CycloMatrix, reduce_vector, rref
from .errors import InvalidParameterError

__all__ = [
    "Flat",
    "Lattice",
    "intersection_lattice",
    "mobius",
    "characteristic_polynomial",
    "charpoly_subsets",
    "triple_check",
    "flat_of",
    "format_poly",
    "serialize_lattice",
]


@dataclass(frozen=True)
class Flat:
    """A flat X, stored as the rref basis of the linear forms vanishing on X.

    ``containing`` lists (sorted) the indices of the hyperplanes that contain X.
    """

    basis: tuple
    pivots: tuple[int, ...]
    containing: tuple[int, ...]
    mobius: int | None = None

    @property
    def rank(self) -> int:
        return len(self.basis)

    def dim(self, ambient: int) -> int:
        return ambient - self.rank

    def basis_matrix(self, arrangement: Arrangement) -> CycloMatrix:
        return CycloMatrix(self.basis, arrangement.field, arrangement.dim)


@dataclass(frozen=True)
class Lattice:
    arrangement: Arrangement
    ranks: tuple[tuple[Flat, ...], ...]

    @property
    def flats(self) -> list[Flat]:
        return [X for level in self.ranks for X in level]

    @property
    def rank_sizes(self) -> list[int]:
        return [len(level) for level in self.ranks]

    @property
    def bottom(self) -> Flat:
        return self.ranks[0][0]

    def find(self, containing: Iterable[int]) -> Flat | None:
        key = tuple(sorted(containing))
        for X in self.flats:
            if X.containing == key:
                return X
        return None

    @staticmethod
    def is_below(X: Flat, Y: Flat) -> bool:
        """X <= Y in L(A), i.e. Y is a subspace of X.

        Forms vanishing on X lie in the span of its containing hyperplanes, so
        row-space containment is containment of the hyperplane index sets.
        """
        return set(X.containing) <= set(Y.containing)

    def mobius_values(self) -> list[int]:
        return [X.mobius for X in self.flats]


def _containing(A: Arrangement, basis, pivots, known: Iterable[int]) -> tuple[int, ...]:
    known = set(known)
    out = []
    for i, h in enumerate(A.hyperplanes):
        if i in known or not any(reduce_vector(basis, pivots, h.covector)):
            out.append(i)
    return tuple(out)


def flat_of(A: Arrangement, indices: Iterable[int]) -> Flat:
    """The intersection of the given hyperplanes of A, as a flat."""
    idx = sorted(set(indices))
    for i in idx:
        if not 0 <= i < len(A):
            raise InvalidParameterError(f"hyperplane index {i} out of range")
    basis, pivots = rref([A[i].covector for i in idx])
    return Flat(basis, pivots, _containing(A, basis, pivots, idx))


@lru_cache(maxsize=256)
def intersection_lattice(A: Arrangement) -> Lattice:
    """All flats of A, built rank by rank and deduplicated by rref basis."""
    bottom = Flat((), (), ())
    levels = [(bottom,)]
    while True:
        seen: dict[tuple, Flat] = {}
        for X in levels[-1]:
            inside = set(X.containing)
            for i, h in enumerate(A.hyperplanes):
                if i in inside:
                    continue
                basis, pivots = rref(X.basis + (h.covector,))
                if basis in seen:
                    continue
                seen[basis] = Flat(basis, pivots, _containing(A, basis, pivots, inside | {i}))
        if not seen:
            break
        levels.append(tuple(sorted(seen.values(), key=lambda X: X.containing)))
    return Lattice(A, tuple(levels))


def mobius(L: Lattice) -> Lattice:
    """Fill mu(bottom, X) by the recursion mu(X) = -sum of mu over flats strictly below X."""
    filled: list[Flat] = []
    new_levels = []
    for level in L.ranks:
        cur = []
        for Y in level:
            if Y.rank == 0:
                mu = 1
            else:
                ys = set(Y.containing)
                mu = -sum(X.mobius for X in filled if set(X.containing) < ys)
            cur.append(replace(Y, mobius=mu))
        filled.extend(cur)
        new_levels.append(tuple(cur))
    return Lattice(L.arrangement, tuple(new_levels))


def characteristic_polynomial(A: Arrangement) -> tuple[int, ...]:
    """Coefficients of chi(A, t), constant term first."""
    L = mobius(intersection_lattice(A))
    coeffs = [0] * (A.dim + 1)
    for X in L.flats:
        coeffs[A.dim - X.rank] += X.mobius
    return tuple(coeffs)


def charpoly_subsets(A: Arrangement, limit: int = 10) -> tuple[int, ...]:
    """chi(A, t) = sum over subsets S of (-1)^|S| t^(l - rank S), by direct enumeration."""
    if len(A) > limit:
        raise InvalidParameterError(f"{len(A)} hyperplanes exceeds the subset-expansion cap {limit}")
    covs = A.covectors()
    n, ell = len(covs), A.dim
    coeffs = [0] * (ell + 1)

    def walk(i: int, basis, pivots, sign: int) -> None:
        if i == n:
            coeffs[ell - len(pivots)] += sign
            return
        walk(i + 1, basis, pivots, sign)
        if any(reduce_vector(basis, pivots, covs[i])):
            nb, npiv = rref(basis + (covs[i],))
            walk(i + 1, nb, npiv, -sign)
        else:
            walk(i + 1, basis, pivots, -sign)

    walk(0, (), (), 1)
    return tuple(coeffs)


def _sub(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    n = max(len(p), len(q))
    return tuple((p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n))


def triple_check(A: Arrangement, H: Hyperplane | int) -> bool:
    """Deletion-restriction: chi(A) == chi(A - H) - chi(A^H)."""
    from .restriction import restrict

    if isinstance(H, Hyperplane):
        i = A.index(H)
    else:
        i = H
        if not 0 <= i < len(A):
            raise InvalidParameterError(f"hyperplane index {i} out of range")
    if A.dim == 1:
        restricted: tuple[int, ...] = (1,)
    else:
        restricted = characteristic_polynomial(restrict(A, flat_of(A, [i])).induced)
    return characteristic_polynomial(A) == _sub(characteristic_polynomial(A.deletion(i)), restricted)


def format_poly(coeffs: Sequence[int], var: str = "t") -> str:
    """Render ascending coefficients as e.g. ``t^2 - 3t + 2``."""
    parts = []
    for d in range(len(coeffs) - 1, -1, -1):
        c = coeffs[d]
        if not c:
            continue
        mag = abs(c)
        if d == 0:
            body = str(mag)
        else:
            mono = var if d == 1 else f"{var}^{d}"
            body = mono if mag == 1 else f"{mag}{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts) if parts else "0"


def serialize_lattice(L: Lattice) -> str:
    if any(X.mobius is None for X in L.flats):
        L = mobius(L)
    rows = sorted(L.flats, key=lambda X: (X.rank, X.containing))
    return "".join(
        f"rank={X.rank} mobius={X.mobius} hyperplanes=[{','.join(map(str, X.containing))}]\n"
        for X in rows
    )
