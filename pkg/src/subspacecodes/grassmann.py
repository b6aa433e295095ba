"""Subspaces of F_q^v, Grassmannian enumeration and the subspace metric.

Enumeration order (this fixes the variable names ``x_<index>`` in exported
models): pivot-column sets in lexicographic order, then the free entries in
lexicographic order. The free entries of a pivot pattern are read row by
row, columns ascending, skipping pivot columns and columns left of the row's
pivot; the first free entry is the most significant digit.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import AmbientMismatch, CapExceeded, ShapeError
from .gf_linalg import (
    MatRows,
    check_q,
    pack_row,
    pivots_bits,
    rank_bits,
    rref,
    rref_bits,
    stack_rank,
    nullspace,
)

MAX_V = 14
MATERIALIZE_CAP = 250_000


def gaussian_binomial(v: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^v."""
    if k < 0 or v < 0:
        raise ValueError("v and k must be non-negative")
    if k > v:
        raise ValueError(f"k={k} exceeds v={v}")
    num = den = 1
    for i in range(1, k + 1):
        num *= q ** (v - k + i) - 1
        den *= q**i - 1
    return num // den


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_q^v given by its canonical (RREF) basis."""

    q: int
    v: int
    basis: MatRows

    @classmethod
    def from_rows(cls, q: int, v: int, rows: Sequence) -> "Subspace":
        if v < 1:
            raise ShapeError("ambient dimension must be positive")
        m = MatRows(q, v, tuple(rows))
        red, _, _ = rref(m)
        return cls(q, v, red)

    @classmethod
    def from_lists(cls, q: int, rows: Sequence[Sequence[int]], v: int | None = None) -> "Subspace":
        m = MatRows.from_lists(q, rows, v)
        return cls(q, m.cols, rref(m)[0])

    @classmethod
    def zero(cls, q: int, v: int) -> "Subspace":
        return cls(q, v, MatRows(q, v, ()))

    @classmethod
    def full(cls, q: int, v: int) -> "Subspace":
        return cls.from_rows(q, v, [pack_row(q, [int(i == j) for j in range(v)]) for i in range(v)])

    @classmethod
    def standard(cls, q: int, v: int, coords: Sequence[int]) -> "Subspace":
        """Span of the standard basis vectors e_c for 0-based ``coords``."""
        return cls.from_rows(q, v, [pack_row(q, [int(c == j) for j in range(v)]) for c in coords])

    @property
    def k(self) -> int:
        return self.basis.nrows

    @property
    def rows(self) -> tuple:
        return self.basis.rows

    @property
    def pivots(self) -> list[int]:
        if self.q == 2:
            return pivots_bits(self.rows)
        return [next(j for j, x in enumerate(r) if x) for r in self.rows]

    @cached_property
    def index(self) -> int:
        """Rank of this subspace in the enumeration order of its Grassmannian."""
        return subspace_index(self)

    def vectors(self) -> list[int]:
        """All q^k vectors of the subspace, encoded as base-q integers."""
        return span_codes(self.q, self.v, self.rows)

    @cached_property
    def span_mask(self) -> int:
        """Bitmask over the q^v vector codes marking members of the subspace."""
        m = 0
        for x in self.vectors():
            m |= 1 << x
        return m

    def row_strings(self) -> list[str]:
        return ["".join(str(x) for x in r) for r in self.basis.to_lists()]

    def __str__(self) -> str:
        return "<" + ",".join(self.row_strings()) + ">" if self.k else "<0>"


# --------------------------------------------------------- vector encodings


def vector_code(q: int, row: int | bytes) -> int:
    """Integer code sum x_i q^i of a row (the packed row itself when q == 2)."""
    if q == 2:
        return row
    code = 0
    for x in reversed(row):
        code = code * q + x
    return code


def span_codes(q: int, v: int, rows: Sequence) -> list[int]:
    if q == 2:
        codes = [0]
        for r in rows:
            codes += [c ^ r for c in codes]
        return codes
    vecs = [(0,) * v]
    for r in rows:
        vecs = [tuple((x + a * y) % q for x, y in zip(c, r)) for a in range(q) for c in vecs]
    return [vector_code(q, bytes(c)) for c in vecs]


# ---------------------------------------------------------- pattern tables


@dataclass(frozen=True)
class _Pattern:
    pivots: tuple[int, ...]
    free: tuple[tuple[int, int], ...]  # (row, column) in digit order
    offset: int
    size: int


@lru_cache(maxsize=None)
def _patterns(q: int, v: int, k: int) -> tuple[tuple[_Pattern, ...], tuple[int, ...]]:
    pats = []
    offset = 0
    for piv in itertools.combinations(range(v), k):
        ps = set(piv)
        free = tuple((i, c) for i, p in enumerate(piv) for c in range(p + 1, v) if c not in ps)
        size = q ** len(free)
        pats.append(_Pattern(piv, free, offset, size))
        offset += size
    return tuple(pats), tuple(p.offset for p in pats)


@lru_cache(maxsize=None)
def _pattern_lookup(q: int, v: int, k: int) -> dict[tuple[int, ...], _Pattern]:
    return {p.pivots: p for p in _patterns(q, v, k)[0]}


def _row_choices(q: int, v: int, pivot: int, cols: Sequence[int]) -> list:
    """All rows with leading 1 at ``pivot`` and free digits on ``cols``, in digit order."""
    out = []
    for digits in itertools.product(range(q), repeat=len(cols)):
        entries = [0] * v
        entries[pivot] = 1
        for c, x in zip(cols, digits):
            entries[c] = x
        out.append(pack_row(q, entries))
    return out


def iter_bases(q: int, v: int, k: int) -> Iterator[tuple]:
    """Canonical bases (row tuples) of all k-subspaces in enumeration order."""
    check_q(q)
    if not 0 <= k <= v:
        raise ValueError(f"need 0 <= k <= v, got k={k}, v={v}")
    for pat in _patterns(q, v, k)[0]:
        per_row = []
        for i, p in enumerate(pat.pivots):
            cols = [c for (r, c) in pat.free if r == i]
            per_row.append(_row_choices(q, v, p, cols))
        yield from itertools.product(*per_row)


class GrassmannianIter:
    """Single-consumer stream over the k-subspaces of F_q^v."""

    def __init__(self, q: int, v: int, k: int) -> None:
        self.q, self.v, self.k = q, v, k
        self._bases = iter_bases(q, v, k)
        self._next_index = 0

    def __iter__(self) -> "GrassmannianIter":
        return self

    def __next__(self) -> Subspace:
        rows = next(self._bases)
        s = Subspace(self.q, self.v, MatRows(self.q, self.v, rows))
        s.__dict__["index"] = self._next_index
        self._next_index += 1
        return s

    def __len__(self) -> int:
        return gaussian_binomial(self.v, self.k, self.q)


def enumerate_subspaces(q: int, v: int, k: int, max_v: int = MAX_V) -> GrassmannianIter:
    check_q(q)
    if not 0 <= k <= v:
        raise ValueError(f"need 0 <= k <= v, got k={k}, v={v}")
    if v > max_v:
        raise CapExceeded(f"v={v} exceeds the enumeration cap {max_v}")
    return GrassmannianIter(q, v, k)


def all_subspaces(q: int, v: int, k: int, cap: int = MATERIALIZE_CAP) -> list[Subspace]:
    """Materialized Grassmannian, refused above ``cap`` elements."""
    n = gaussian_binomial(v, k, q)
    if n > cap:
        raise CapExceeded(f"[{v} {k}]_{q} = {n} exceeds the materialization cap {cap}")
    return list(enumerate_subspaces(q, v, k))


def subspace_index(u: Subspace) -> int:
    pat = _pattern_lookup(u.q, u.v, u.k)[tuple(u.pivots)]
    q = u.q
    value = 0
    if q == 2:
        for i, c in pat.free:
            value = (value << 1) | ((u.rows[i] >> c) & 1)
    else:
        for i, c in pat.free:
            value = value * q + u.rows[i][c]
    return pat.offset + value


def subspace_at(q: int, v: int, k: int, index: int) -> Subspace:
    """Inverse of :func:`subspace_index`."""
    pats, offsets = _patterns(q, v, k)
    if not 0 <= index < gaussian_binomial(v, k, q):
        raise IndexError(index)
    pat = pats[bisect.bisect_right(offsets, index) - 1]
    value = index - pat.offset
    entries = [[0] * v for _ in range(k)]
    for i, p in enumerate(pat.pivots):
        entries[i][p] = 1
    for i, c in reversed(pat.free):
        value, entries[i][c] = divmod(value, q)
    rows = tuple(pack_row(q, e) for e in entries)
    s = Subspace(q, v, MatRows(q, v, rows))
    s.__dict__["index"] = index
    return s


# ------------------------------------------------------------------ metric


def _check_same_ambient(u: Subspace, w: Subspace) -> None:
    if u.q != w.q or u.v != w.v:
        raise AmbientMismatch(f"F_{u.q}^{u.v} vs F_{w.q}^{w.v}")


def join_dim(u: Subspace, w: Subspace) -> int:
    _check_same_ambient(u, w)
    return stack_rank(u.basis, w.basis)


def intersect_dim(u: Subspace, w: Subspace) -> int:
    return u.k + w.k - join_dim(u, w)


def subspace_distance(u: Subspace, w: Subspace) -> int:
    """d_s(U, W) = dim(U+W) - dim(U cap W)."""
    return 2 * join_dim(u, w) - u.k - w.k


def join(u: Subspace, w: Subspace) -> Subspace:
    _check_same_ambient(u, w)
    return Subspace.from_rows(u.q, u.v, u.rows + w.rows)


def dual(u: Subspace) -> Subspace:
    """Orthogonal complement under the standard dot product."""
    if u.k == 0:
        return Subspace.full(u.q, u.v)
    if u.q == 2:
        return Subspace(2, u.v, MatRows(2, u.v, dual_bits(u.rows, u.v)))
    return Subspace(u.q, u.v, nullspace(u.basis))


def meet(u: Subspace, w: Subspace) -> Subspace:
    """U cap W, computed as (U^perp + W^perp)^perp."""
    _check_same_ambient(u, w)
    return dual(join(dual(u), dual(w)))


def contains(big: Subspace, small: Subspace) -> bool:
    _check_same_ambient(big, small)
    return small.k <= big.k and stack_rank(big.basis, small.basis) == big.k


def incident(u: Subspace, x: Subspace) -> bool:
    """True iff U <= X or X <= U."""
    _check_same_ambient(u, x)
    return stack_rank(u.basis, x.basis) == max(u.k, x.k)


# ------------------------------------------------------------ F_2 fast paths


def dual_bits(rows: Sequence[int], v: int) -> tuple[int, ...]:
    """RREF basis of the orthogonal complement of an RREF basis over F_2."""
    piv = pivots_bits(rows)
    pset = set(piv)
    out = []
    for f in range(v):
        if f in pset:
            continue
        x = 1 << f
        for r, p in zip(rows, piv):
            if (r >> f) & 1:
                x |= 1 << p
        out.append(x)
    return rref_bits(out)


def intersect_dim_bits(a: Sequence[int], b: Sequence[int]) -> int:
    return len(a) + len(b) - rank_bits(tuple(a) + tuple(b))


def popcount_dim(mask_a: int, mask_b: int, q: int = 2) -> int:
    """dim(U cap W) from two span masks: the meet has q^dim members."""
    n = (mask_a & mask_b).bit_count()
    d = 0
    while n > 1:
        n //= q
        d += 1
    return d


def index_table(v: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Lookup tables for :func:`indices_of_bases` over F_2.

    Returns ``offset_by_mask`` (pivot-column bitmask -> pattern offset, -1 if
    not a valid k-pattern) and ``weights`` of shape (2^v, k, v) holding the
    place value of each free entry.
    """
    return _index_table(v, k)


@lru_cache(maxsize=None)
def _index_table(v: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    pats = _patterns(2, v, k)[0]
    offset = np.full(1 << v, -1, dtype=np.int64)
    weights = np.zeros((1 << v, max(k, 1), v), dtype=np.int64)
    for p in pats:
        mask = sum(1 << c for c in p.pivots)
        offset[mask] = p.offset
        nf = len(p.free)
        for pos, (i, c) in enumerate(p.free):
            weights[mask, i, c] = 1 << (nf - 1 - pos)
    offset.setflags(write=False)
    weights.setflags(write=False)
    return offset, weights


def rref_rows_np(rows: np.ndarray, v: int) -> np.ndarray:
    """Vectorized RREF over F_2 of many full-rank k-row bases.

    ``rows`` has shape (N, k) of packed row ints; the result has the same
    shape with rows sorted by pivot. Rank-deficient inputs raise.
    """
    a = np.array(rows, dtype=np.int64, copy=True)
    n, k = a.shape
    r = np.zeros(n, dtype=np.int64)
    ar = np.arange(n)
    row_ids = np.arange(k)[None, :]
    for c in range(v):
        bit = (a >> c) & 1
        eligible = (bit == 1) & (row_ids >= r[:, None]) & (r[:, None] < k)
        has = eligible.any(axis=1)
        if not has.any():
            continue
        first = np.argmax(eligible, axis=1)
        idx = ar[has]
        src = first[has]
        dst = r[has]
        tmp = a[idx, dst].copy()
        a[idx, dst] = a[idx, src]
        a[idx, src] = tmp
        prow = a[idx, dst]
        sub = a[idx]
        hit = ((sub >> c) & 1).astype(bool)
        hit[np.arange(len(idx)), dst] = False
        sub ^= np.where(hit, prow[:, None], 0)
        a[idx] = sub
        r[has] += 1
    if (r != k).any():
        raise ValueError("rank-deficient basis in rref_rows_np")
    return a


def indices_of_bases(rows: np.ndarray, v: int, chunk: int = 1 << 19) -> np.ndarray:
    """Enumeration indices of the F_2 subspaces spanned by each row of ``rows``."""
    rows = np.asarray(rows, dtype=np.int64)
    n, k = rows.shape
    if k == 0:
        return np.zeros(n, dtype=np.int64)
    offset, weights = _index_table(v, k)
    out = np.empty(n, dtype=np.int64)
    for lo in range(0, n, chunk):
        red = rref_rows_np(rows[lo : lo + chunk], v)
        mask = np.zeros(len(red), dtype=np.int64)
        for i in range(k):
            mask |= red[:, i] & -red[:, i]
        idx = offset[mask]
        if (idx < 0).any():
            raise ValueError("invalid pivot pattern")
        idx = idx.copy()
        for i in range(k):
            col = red[:, i]
            for c in range(v):
                bit = (col >> c) & 1
                if bit.any():
                    idx += bit * weights[mask, i, c]
        out[lo : lo + chunk] = idx
    return out


def bases_array(q: int, v: int, k: int) -> np.ndarray:
    """All canonical k-bases over F_2 as an (N, k) int64 array in index order."""
    if q != 2:
        raise ValueError("bases_array is an F_2 fast path")
    n = gaussian_binomial(v, k, 2)
    out = np.zeros((n, k), dtype=np.int64)
    for i, rows in enumerate(iter_bases(2, v, k)):
        out[i, :] = rows
    return out


def combine_rows(bases: np.ndarray, coeffs: Sequence[int]) -> np.ndarray:
    """Images of coefficient vectors (bit-packed over the basis rows).

    ``bases`` is (N, k); the result is (N, len(coeffs)) with entry
    XOR_{i in coeff} bases[:, i].
    """
    n, k = bases.shape
    out = np.zeros((n, len(coeffs)), dtype=np.int64)
    for j, c in enumerate(coeffs):
        for i in range(k):
            if (c >> i) & 1:
                out[:, j] ^= bases[:, i]
    return out
