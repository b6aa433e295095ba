"""Exact matrix arithmetic over the prime fields F_2, F_3, F_5 and F_7.

Rows over F_2 are bit-packed into Python ints, coordinate 1 being the least
significant bit, so row operations are single XORs. Rows over the other
fields are ``bytes`` with one entry per byte.

The canonical form used everywhere is the reduced row echelon form with the
zero rows removed. Pivots are the leftmost nonzero coordinates, i.e. the
lowest set bits in the packed representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FieldError, ShapeError

SUPPORTED_Q = (2, 3, 5, 7)


@dataclass(frozen=True)
class FieldSpec:
    q: int

    def __post_init__(self) -> None:
        if self.q not in SUPPORTED_Q:
            raise FieldError(f"unsupported field order q={self.q}; expected one of {SUPPORTED_Q}")

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.q - 2, self.q)


def check_q(q: int) -> int:
    FieldSpec(q)
    return q


@dataclass(frozen=True)
class MatRows:
    """A matrix stored by rows.

    ``rows`` holds ints when ``q == 2`` and ``bytes`` otherwise.
    """

    q: int
    cols: int
    rows: tuple

    def __post_init__(self) -> None:
        check_q(self.q)
        if self.cols < 1:
            raise ShapeError("a matrix needs at least one column")
        if self.q == 2:
            limit = 1 << self.cols
            for r in self.rows:
                if not isinstance(r, int) or r < 0 or r >= limit:
                    raise ShapeError(f"row {r!r} does not fit {self.cols} columns")
        else:
            for r in self.rows:
                if len(r) != self.cols or any(x >= self.q for x in r):
                    raise ShapeError(f"row {r!r} is not a length-{self.cols} vector over F_{self.q}")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @classmethod
    def from_lists(cls, q: int, rows: Sequence[Sequence[int]], cols: int | None = None) -> "MatRows":
        if cols is None:
            if not rows:
                raise ShapeError("cols must be given for an empty matrix")
            cols = len(rows[0])
        packed = []
        for row in rows:
            if len(row) != cols:
                raise ShapeError("ragged rows")
            packed.append(pack_row(q, [x % q for x in row]))
        return cls(q, cols, tuple(packed))

    def to_lists(self) -> list[list[int]]:
        return [unpack_row(self.q, r, self.cols) for r in self.rows]

    def entry(self, i: int, j: int) -> int:
        r = self.rows[i]
        return (r >> j) & 1 if self.q == 2 else r[j]


def pack_row(q: int, entries: Sequence[int]) -> int | bytes:
    if q == 2:
        value = 0
        for j, x in enumerate(entries):
            if x & 1:
                value |= 1 << j
        return value
    return bytes(entries)


def unpack_row(q: int, row: int | bytes, cols: int) -> list[int]:
    if q == 2:
        return [(row >> j) & 1 for j in range(cols)]
    return list(row)


# ---------------------------------------------------------------- F_2 kernels


def rref_bits(rows: Iterable[int]) -> tuple[int, ...]:
    """Zero-row-free RREF of bit-packed rows, sorted by pivot column."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            if r & (b & -b):
                r ^= b
        if r:
            low = r & -r
            basis = [b ^ r if b & low else b for b in basis]
            basis.append(r)
    basis.sort(key=lambda b: b & -b)
    return tuple(basis)


def rank_bits(rows: Iterable[int]) -> int:
    # echelon form keyed by lowest bit; no back substitution needed
    by_pivot: dict[int, int] = {}
    for r in rows:
        while r:
            low = r & -r
            b = by_pivot.get(low)
            if b is None:
                by_pivot[low] = r
                break
            r ^= b
    return len(by_pivot)


def pivots_bits(rows: Sequence[int]) -> list[int]:
    return [(r & -r).bit_length() - 1 for r in rows]


# ------------------------------------------------------ generic prime fields


def rref_dense(q: int, rows: Sequence[Sequence[int]], cols: int) -> tuple[list[list[int]], list[int]]:
    """Gauss-Jordan elimination on lists of ints mod ``q``.

    Works for every supported ``q`` including 2; used for q > 2 and as the
    byte-wise reference for the packed F_2 path.
    """
    m = [[x % q for x in row] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], q - 2, q)
        m[r] = [(x * inv) % q for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % q for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rref(m: MatRows) -> tuple[MatRows, int, list[int]]:
    """Return ``(R, rank, pivots)`` with ``R`` the zero-row-free RREF of ``m``."""
    if m.q == 2:
        rows = rref_bits(m.rows)
        return MatRows(2, m.cols, rows), len(rows), pivots_bits(rows)
    reduced, pivots = rref_dense(m.q, [list(r) for r in m.rows], m.cols)
    rows = tuple(bytes(r) for r in reduced)
    return MatRows(m.q, m.cols, rows), len(rows), pivots


def rank(m: MatRows) -> int:
    if m.q == 2:
        return rank_bits(m.rows)
    return len(rref_dense(m.q, [list(r) for r in m.rows], m.cols)[1])


def stack_rank(a: MatRows, b: MatRows) -> int:
    """Rank of the vertical concatenation of ``a`` and ``b``."""
    if a.q != b.q:
        raise FieldError(f"field mismatch: q={a.q} vs q={b.q}")
    if a.cols != b.cols:
        raise ShapeError(f"column mismatch: {a.cols} vs {b.cols}")
    if a.q == 2:
        return rank_bits(a.rows + b.rows)
    return len(rref_dense(a.q, [list(r) for r in a.rows + b.rows], a.cols)[1])


def in_row_space(m: MatRows, row: int | bytes) -> bool:
    """Membership test of ``row`` in the row space of an RREF matrix ``m``."""
    if m.q == 2:
        r = row
        for b in m.rows:
            if r & (b & -b):
                r ^= b
        return r == 0
    q = m.q
    r = list(row)
    piv = [next(j for j, x in enumerate(b) if x) for b in m.rows]
    for b, p in zip(m.rows, piv):
        f = r[p]
        if f:
            r = [(x - f * y) % q for x, y in zip(r, b)]
    return not any(r)


def nullspace(m: MatRows) -> MatRows:
    """Basis (in RREF) of ``{x : m x^T = 0}`` under the standard dot product."""
    red, _, piv = rref(m)
    q, v = m.q, m.cols
    free = [c for c in range(v) if c not in set(piv)]
    out = []
    for f in free:
        x = [0] * v
        x[f] = 1
        for row, p in zip(red.rows, piv):
            e = (row >> f) & 1 if q == 2 else row[f]
            if e:
                x[p] = (-e) % q
        out.append(pack_row(q, x))
    if q == 2:
        return MatRows(2, v, rref_bits(out))
    reduced, _ = rref_dense(q, [list(r) for r in out], v)
    return MatRows(q, v, tuple(bytes(r) for r in reduced))
