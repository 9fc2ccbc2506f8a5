"""Exact arithmetic in the cyclotomic fields Q(zeta_r) and exact linear algebra over them.

Elements are stored in the power basis 1, zeta, ..., zeta^(phi(r)-1) with
:class:`fractions.Fraction` coefficients, reduced modulo the r-th cyclotomic
polynomial after every operation, so two elements are equal iff their
coefficient tuples are equal.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .errors import InvalidParameterError

__all__ = [
    "cyclotomic_polynomial",
    "CycloField",
    "cyclotomic_field",
    "CycloNum",
    "CycloMatrix",
    "echelon",
    "embed_complex",
    "rref",
    "reduce_vector",
    "rank",
    "lift",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _exact_div_int(num: list[int], den: Sequence[int]) -> list[int]:
    # den is monic; the division must leave no remainder
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            out[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(r: int) -> tuple[int, ...]:
    """Integer coefficients of the r-th cyclotomic polynomial, constant term first.

    >>> cyclotomic_polynomial(4)
    (1, 0, 1)
    """
    if not isinstance(r, int) or r < 1:
        raise InvalidParameterError(f"cyclotomic order must be a positive integer, got {r!r}")
    poly = [-1] + [0] * (r - 1) + [1]
    for d in _divisors(r)[:-1]:
        poly = _exact_div_int(poly, cyclotomic_polynomial(d))
    return tuple(poly)


class CycloField:
    """The field Q(zeta_r). Use :func:`cyclotomic_field` to get the shared instance."""

    def __init__(self, order: int):
        self.order = order
        self.phi = cyclotomic_polynomial(order)
        self.degree = len(self.phi) - 1
        d = self.degree
        # x^i mod phi for d <= i <= 2d-2, as integer vectors
        table = []
        cur = [-c for c in self.phi[:d]]
        for _ in range(max(d - 1, 0)):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for j in range(d):
                    cur[j] -= top * self.phi[j]
        self._reduction = tuple(table)
        self._zeta_powers: dict[int, CycloNum] = {}

    def __repr__(self) -> str:
        return f"CycloField({self.order})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CycloField) and other.order == self.order

    def __hash__(self) -> int:
        return hash(("CycloField", self.order))

    def __reduce__(self):
        return (cyclotomic_field, (self.order,))

    def _reduce(self, coeffs: list) -> tuple[Fraction, ...]:
        # coeffs has length at most 2*degree - 1
        d = self.degree
        out = list(coeffs[:d])
        for i in range(d, len(coeffs)):
            c = coeffs[i]
            if c:
                row = self._reduction[i - d]
                for j in range(d):
                    if row[j]:
                        out[j] += c * row[j]
        return tuple(out)

    def element(self, coeffs: Iterable) -> "CycloNum":
        """Element with the given power-basis coefficients (reduced if longer than the degree)."""
        return CycloNum(self, self._reduce_long([Fraction(c) for c in coeffs]))

    def scalar(self, value) -> "CycloNum":
        return CycloNum(self, (Fraction(value),) + (_ZERO,) * (self.degree - 1))

    @property
    def zero(self) -> "CycloNum":
        return self.scalar(0)

    @property
    def one(self) -> "CycloNum":
        return self.scalar(1)

    def zeta(self, t: int = 1) -> "CycloNum":
        """The power zeta_r^t."""
        t %= self.order
        z = self._zeta_powers.get(t)
        if z is None:
            cs = [_ZERO] * (t + 1)
            cs[t] = _ONE
            z = CycloNum(self, self._reduce_long(cs))
            self._zeta_powers[t] = z
        return z

    def _reduce_long(self, cs: list[Fraction]) -> tuple[Fraction, ...]:
        d = self.degree
        if len(cs) <= d:
            return tuple(cs + [_ZERO] * (d - len(cs)))
        rem = _poly_divmod(cs, [Fraction(c) for c in self.phi])[1]
        return tuple(rem + [_ZERO] * (d - len(rem)))


@lru_cache(maxsize=None)
def cyclotomic_field(r: int) -> CycloField:
    cyclotomic_polynomial(r)  # validates r
    return CycloField(r)


def _trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(num: list, den: list) -> tuple[list, list]:
    num = _trim(list(num))
    den = _trim(list(den))
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    if len(num) < len(den):
        return [], num
    q = [_ZERO] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1] / lead
        q[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    return q, _trim(num[: len(den) - 1])


def _poly_sub_mul(a: list, q: list, b: list) -> list:
    # a - q*b
    out = list(a) + [_ZERO] * max(0, len(q) + len(b) - 1 - len(a))
    for i, qi in enumerate(q):
        if qi:
            for j, bj in enumerate(b):
                out[i + j] -= qi * bj
    return _trim(out)


class CycloNum:
    """An element of Q(zeta_r)."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: CycloField, coeffs: tuple[Fraction, ...]):
        if len(coeffs) != field.degree:
            raise InvalidParameterError(
                f"expected {field.degree} coefficients for Q(zeta_{field.order}), got {len(coeffs)}"
            )
        self.field = field
        self.coeffs = coeffs
        self._hash = None

    # -- coercion -------------------------------------------------------
    def _coerce(self, other) -> "CycloNum":
        if isinstance(other, CycloNum):
            if other.field.order != self.field.order:
                raise InvalidParameterError(
                    f"field mismatch: Q(zeta_{self.field.order}) vs Q(zeta_{other.field.order})"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.scalar(other)
        return NotImplemented

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloNum(self.field, tuple(x + y for x, y in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloNum(self.field, tuple(x - y for x, y in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return CycloNum(self.field, tuple(-x for x in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNum(self.field, tuple(x * other for x in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self.field.degree
        a, b = self.coeffs, o.coeffs
        if d == 1:
            return CycloNum(self.field, (a[0] * b[0],))
        conv = [_ZERO] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        return CycloNum(self.field, self.field._reduce(conv))

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        if not self:
            raise ZeroDivisionError("division by zero in Q(zeta_%d)" % self.field.order)
        if self.field.degree == 1:
            return CycloNum(self.field, (1 / self.coeffs[0],))
        r0 = [Fraction(c) for c in self.field.phi]
        r1 = _trim(list(self.coeffs))
        s0, s1 = [], [_ONE]
        while r1:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub_mul(s0, q, s1)
        # phi irreducible, so the gcd r0 is a nonzero constant
        c = r0[0]
        return CycloNum(self.field, self.field._reduce_long([x / c for x in s0]))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = self.field.one
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison ------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, CycloNum):
            return self.field.order == other.field.order and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if not any(self.coeffs[1:]):
                # agree with hash(int) / hash(Fraction) for rational elements
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.field.order, self.coeffs))
        return self._hash

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def embed(self, root_index: int = 1) -> complex:
        return embed_complex(self, root_index)

    def __repr__(self) -> str:
        return f"CycloNum({self.field.order}, {self})"

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "z" if i == 1 else f"z^{i}"
                terms.append(mono if c == 1 else ("-" + mono if c == -1 else f"{c}*{mono}"))
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


@lru_cache(maxsize=None)
def _root(order: int, root_index: int) -> complex:
    return cmath.exp(2j * cmath.pi * root_index / order)


def embed_complex(a: CycloNum, root_index: int = 1) -> complex:
    """Evaluate ``a`` at zeta_r -> exp(2*pi*i*root_index/r)."""
    r = a.field.order
    if gcd(root_index, r) != 1:
        raise InvalidParameterError(f"root index {root_index} is not coprime to {r}")
    w = _root(r, root_index % r)
    total = 0j
    p = 1 + 0j
    for c in a.coeffs:
        if c:
            total += float(c) * p
        p *= w
    return total


def lift(a: CycloNum, target: CycloField | int) -> CycloNum:
    """Image of ``a`` under Q(zeta_s) -> Q(zeta_n), zeta_s -> zeta_n^(n/s), for s | n."""
    field = target if isinstance(target, CycloField) else cyclotomic_field(target)
    s, n = a.field.order, field.order
    if n % s:
        raise InvalidParameterError(f"Q(zeta_{s}) does not embed in Q(zeta_{n})")
    if s == n:
        return a
    step = n // s
    out = field.zero
    for i, c in enumerate(a.coeffs):
        if c:
            out = out + field.zeta(i * step) * c
    return out


# -- exact linear algebra ------------------------------------------------

Row = tuple  # tuple[CycloNum, ...]


def rref(rows: Sequence[Sequence[CycloNum]]) -> tuple[tuple[Row, ...], tuple[int, ...]]:
    """Reduced row-echelon form with zero rows dropped, and the pivot columns."""
    mat = [list(r) for r in rows]
    if not mat:
        return (), ()
    ncols = len(mat[0])
    pivots: list[int] = []
    lead = 0
    for col in range(ncols):
        piv = next((i for i in range(lead, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[lead], mat[piv] = mat[piv], mat[lead]
        prow = mat[lead]
        inv = prow[col].inverse()
        if prow[col] != 1:
            prow = [x * inv for x in prow]
            mat[lead] = prow
        for i in range(len(mat)):
            if i != lead:
                f = mat[i][col]
                if f:
                    mat[i] = [x - f * y if y else x for x, y in zip(mat[i], prow)]
        pivots.append(col)
        lead += 1
        if lead == len(mat):
            break
    return tuple(tuple(r) for r in mat[:lead]), tuple(pivots)


def reduce_vector(basis: Sequence[Row], pivots: Sequence[int], v: Sequence[CycloNum]) -> list:
    """Remainder of ``v`` after elimination against an rref basis; zero iff v is in the row space."""
    out = list(v)
    for row, col in zip(basis, pivots):
        f = out[col]
        if f:
            out = [x - f * y if y else x for x, y in zip(out, row)]
    return out


def rank(rows: Sequence[Sequence[CycloNum]]) -> int:
    return len(rref(rows)[1])


class CycloMatrix:
    """A matrix of :class:`CycloNum` entries over one field."""

    __slots__ = ("field", "rows", "ncols")

    def __init__(self, rows: Iterable[Iterable[CycloNum]], field: CycloField | None = None,
                 ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if field is None:
            if not rows or not rows[0]:
                raise InvalidParameterError("field required for an empty matrix")
            field = rows[0][0].field
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise InvalidParameterError("ragged matrix")
            for x in r:
                if x.field.order != field.order:
                    raise InvalidParameterError("matrix entries span several fields")
        self.field = field
        self.rows = rows
        self.ncols = ncols

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    @classmethod
    def identity(cls, n: int, field: CycloField) -> "CycloMatrix":
        return cls(
            [[field.one if i == j else field.zero for j in range(n)] for i in range(n)], field, n
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CycloMatrix)
            and self.field == other.field
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.field.order, self.ncols, self.rows))

    def __matmul__(self, other: "CycloMatrix") -> "CycloMatrix":
        if self.ncols != len(other.rows):
            raise InvalidParameterError("shape mismatch")
        cols = list(zip(*other.rows)) if other.rows else []
        zero = self.field.zero
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = zero
                for x, y in zip(r, c):
                    if x and y:
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return CycloMatrix(out, self.field, other.ncols)

    def to_complex(self, root_index: int = 1):
        import numpy as np

        return np.array(
            [[embed_complex(x, root_index) for x in r] for r in self.rows], dtype=complex
        ).reshape(len(self.rows), self.ncols)

    def inverse(self) -> "CycloMatrix":
        n = len(self.rows)
        if n != self.ncols:
            raise InvalidParameterError("inverse of a non-square matrix")
        ident = CycloMatrix.identity(n, self.field).rows
        red, piv = rref([r + e for r, e in zip(self.rows, ident)])
        if piv[:n] != tuple(range(n)) or len(piv) < n:
            raise ZeroDivisionError("singular matrix")
        return CycloMatrix([r[n:] for r in red], self.field, n)

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"CycloMatrix(r={self.field.order}, [{body}])"


def echelon(m: CycloMatrix) -> tuple[CycloMatrix, int]:
    """Unique reduced row-echelon form (zero rows dropped) and rank."""
    red, piv = rref(m.rows)
    return CycloMatrix(red, m.field, m.ncols), len(piv)
