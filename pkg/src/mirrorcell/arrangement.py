"""Central hyperplane arrangements with cyclotomic covectors.

The arrangements built here are A^k_l(r) (the first k coordinate hyperplanes
plus all y_i = zeta*y_j), the braid arrangement in the difference coordinates
z_i = x_i - x_l, and the mirror arrangements of the monomial groups G(r, p, l).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import CycloField, CycloNum, cyclotomic_field, embed_complex, rank
from .errors import InvalidParameterError

__all__ = [
    "Hyperplane",
    "Arrangement",
    "build_Akl",
    "build_braid",
    "build_monomial_reflection",
    "is_essential",
    "serialize",
    "parse",
]


def _normalize(covector: Sequence[CycloNum]) -> tuple[CycloNum, ...]:
    lead = next((c for c in covector if c), None)
    if lead is None:
        raise InvalidParameterError("zero covector does not define a hyperplane")
    if lead == 1:
        return tuple(covector)
    inv = lead.inverse()
    return tuple(c * inv if c else c for c in covector)


@dataclass(frozen=True)
class Hyperplane:
    """Kernel of a linear form, stored with its first nonzero coefficient equal to 1."""

    covector: tuple[CycloNum, ...]

    def __post_init__(self):
        object.__setattr__(self, "covector", _normalize(self.covector))

    @property
    def field(self) -> CycloField:
        return self.covector[0].field

    def __len__(self) -> int:
        return len(self.covector)

    def contains_point(self, y: Sequence[CycloNum]) -> bool:
        total = self.field.zero
        for c, x in zip(self.covector, y):
            if c and x:
                total = total + c * x
        return not total

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.covector, start=1):
            if c:
                terms.append(f"y{i}" if c == 1 else f"({c})*y{i}")
        return " + ".join(terms) + " = 0"


@dataclass(frozen=True)
class Arrangement:
    dim: int
    field: CycloField
    hyperplanes: tuple[Hyperplane, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        hs = tuple(self.hyperplanes)
        object.__setattr__(self, "hyperplanes", hs)
        if self.dim < 0:
            raise InvalidParameterError("negative dimension")
        seen = set()
        for h in hs:
            if len(h.covector) != self.dim:
                raise InvalidParameterError(
                    f"covector of length {len(h.covector)} in dimension {self.dim}"
                )
            if h.field != self.field:
                raise InvalidParameterError("hyperplane over a different field")
            if h.covector in seen:
                raise InvalidParameterError(f"duplicate hyperplane {h}")
            seen.add(h.covector)

    @classmethod
    def from_covectors(cls, covectors: Iterable[Sequence[CycloNum]], dim: int,
                       field: CycloField, label: str = "", dedup: bool = False) -> "Arrangement":
        hs: list[Hyperplane] = []
        seen = set()
        for c in covectors:
            h = Hyperplane(tuple(c))
            if dedup and h.covector in seen:
                continue
            seen.add(h.covector)
            hs.append(h)
        return cls(dim, field, tuple(hs), label)

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def __iter__(self):
        return iter(self.hyperplanes)

    def __getitem__(self, i: int) -> Hyperplane:
        return self.hyperplanes[i]

    def index(self, h: Hyperplane) -> int:
        try:
            return self.hyperplanes.index(h)
        except ValueError:
            raise InvalidParameterError(f"{h} is not a hyperplane of this arrangement") from None

    def covectors(self) -> list[tuple[CycloNum, ...]]:
        return [h.covector for h in self.hyperplanes]

    def as_set(self) -> frozenset:
        return frozenset(h.covector for h in self.hyperplanes)

    def deletion(self, i: int) -> "Arrangement":
        hs = self.hyperplanes[:i] + self.hyperplanes[i + 1:]
        return Arrangement(self.dim, self.field, hs, f"{self.label} minus H{i}")

    def permute_coordinates(self, perm: Sequence[int]) -> "Arrangement":
        """Image under y -> y o perm: new coordinate perm[j] carries old coordinate j."""
        if sorted(perm) != list(range(self.dim)):
            raise InvalidParameterError(f"{perm!r} is not a permutation of range({self.dim})")
        covs = []
        for c in self.covectors():
            new = [None] * self.dim
            for j, pj in enumerate(perm):
                new[pj] = c[j]
            covs.append(new)
        return Arrangement.from_covectors(covs, self.dim, self.field, self.label)

    def lift(self, target: CycloField) -> "Arrangement":
        from .cyclotomic import lift

        if target == self.field:
            return self
        covs = [[lift(x, target) for x in c] for c in self.covectors()]
        return Arrangement.from_covectors(covs, self.dim, target, self.label)

    def covector_matrix(self, root_index: int = 1) -> np.ndarray:
        """Complex embedding of the covectors, one row per hyperplane."""
        out = np.zeros((len(self), self.dim), dtype=complex)
        for i, h in enumerate(self.hyperplanes):
            for j, c in enumerate(h.covector):
                if c:
                    out[i, j] = embed_complex(c, root_index)
        return out


def _check_params(k: int, ell: int, r: int) -> None:
    if ell < 2:
        raise InvalidParameterError(f"need l >= 2, got l={ell}")
    if not 0 <= k <= ell:
        raise InvalidParameterError(f"need 0 <= k <= l, got k={k}, l={ell}")
    if r < 1:
        raise InvalidParameterError(f"need r >= 1, got r={r}")


@lru_cache(maxsize=None)
def build_Akl(k: int, ell: int, r: int) -> Arrangement:
    """A^k_l(r): y_a = 0 for a <= k, then y_i - zeta^t y_j = 0 for i < j, t = 0..r-1."""
    _check_params(k, ell, r)
    F = cyclotomic_field(r)
    zero, one = F.zero, F.one
    covs = []
    for a in range(k):
        covs.append([one if j == a else zero for j in range(ell)])
    for i in range(ell):
        for j in range(i + 1, ell):
            for t in range(r):
                c = [zero] * ell
                c[i] = one
                c[j] = -F.zeta(t)
                covs.append(c)
    return Arrangement.from_covectors(covs, ell, F, f"A^{k}_{ell}({r})")


def build_braid(ell: int) -> Arrangement:
    """The braid arrangement of S_l in the coordinates z_i = x_i - x_l (dimension l-1)."""
    if ell < 2:
        raise InvalidParameterError(f"need l >= 2, got l={ell}")
    m = ell - 1
    F = cyclotomic_field(1)
    if m == 1:
        return Arrangement.from_covectors([[F.one]], 1, F, "A_1")
    A = build_Akl(m, m, 1)
    return Arrangement(m, F, A.hyperplanes, f"A_{m}")


def build_monomial_reflection(r: int, p: int, ell: int) -> Arrangement:
    """Mirrors of G(r, p, l): A^l_l(r) if p < r, A^0_l(r) if p = r."""
    if r < 1 or p < 1 or r % p:
        raise InvalidParameterError(f"p={p} must be a positive divisor of r={r}")
    if ell < 2:
        raise InvalidParameterError(f"need l >= 2, got l={ell}")
    A = build_Akl(ell if p < r else 0, ell, r)
    return Arrangement(A.dim, A.field, A.hyperplanes, f"G({r},{p},{ell})")


def is_essential(A: Arrangement) -> bool:
    if not A.hyperplanes:
        return A.dim == 0
    return rank(A.covectors()) == A.dim


# -- canonical text format ----------------------------------------------

_HEADER = re.compile(r"^arrangement dim=(\d+) r=(\d+) count=(\d+)$")
_COORD = re.compile(r"\[([^\]]*)\]")


def serialize(A: Arrangement) -> str:
    """Header line, then one line per hyperplane: each coordinate as ``[c0,c1,...]``."""
    lines = [f"arrangement dim={A.dim} r={A.field.order} count={len(A)}"]
    for h in A.hyperplanes:
        lines.append(" ".join("[" + ",".join(str(c) for c in x.coeffs) + "]" for x in h.covector))
    return "\n".join(lines) + "\n"


def parse(text: str) -> Arrangement:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidParameterError("empty arrangement text")
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise InvalidParameterError(f"bad header line: {lines[0]!r}")
    dim, r, count = (int(g) for g in m.groups())
    F = cyclotomic_field(r)
    if len(lines) - 1 != count:
        raise InvalidParameterError(f"header says {count} hyperplanes, found {len(lines) - 1}")
    covs = []
    for ln in lines[1:]:
        coords = _COORD.findall(ln)
        if len(coords) != dim:
            raise InvalidParameterError(f"expected {dim} coordinates in {ln!r}")
        row = []
        for c in coords:
            vals = [Fraction(v) for v in c.split(",")]
            if len(vals) != F.degree:
                raise InvalidParameterError(f"expected {F.degree} coefficients in [{c}]")
            row.append(CycloNum(F, tuple(vals)))
        covs.append(row)
    return Arrangement.from_covectors(covs, dim, F)
