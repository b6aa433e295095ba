"""Lifted Gabidulin (MRD) codes over F_16 and the plus-one augmentation.

F_16 is realized as 4-bit polynomials modulo x^4 + x + 1. An element's bit j
is its coefficient of x^j and becomes column j of the expanded F_2 matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .codes import SubspaceCode
from .errors import ConstructionError
from .gf_linalg import MatRows, rank_bits
from .grassmann import Subspace

M = 4
MODULUS = 0b10011  # x^4 + x + 1


def gf16_mul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 0b10000:
            a ^= MODULUS
    return r


def frobenius(a: int, i: int) -> int:
    """a^(2^i) in F_16."""
    for _ in range(i):
        a = gf16_mul(a, a)
    return a


@dataclass(frozen=True)
class GabidulinSpec:
    n: int
    k: int  # message dimension: q-degree of the linearized polynomial is < k
    m: int = M

    def __post_init__(self) -> None:
        if self.m != M:
            raise ConstructionError(f"only m={M} (F_16) is supported")
        if not 1 <= self.k <= self.n <= self.m:
            raise ConstructionError(f"need 1 <= k <= n <= m, got k={self.k}, n={self.n}, m={self.m}")

    @property
    def points(self) -> tuple[int, ...]:
        # 1, x, x^2, x^3: linearly independent over F_2
        return tuple(1 << j for j in range(self.n))

    @property
    def rank_distance(self) -> int:
        return self.n - self.k + 1


def mrd_matrices(spec: GabidulinSpec) -> list[MatRows]:
    """All 16^k codeword matrices (n x m over F_2) of the Gabidulin code.

    Messages (f_0, ..., f_{k-1}) run over F_16^k in lexicographic order;
    row j of the matrix is f(g_j) = sum_i f_i g_j^(2^i).
    """
    pts = spec.points
    powers = [[frobenius(g, i) for i in range(spec.k)] for g in pts]
    out = []
    for coeffs in itertools.product(range(16), repeat=spec.k):
        rows = []
        for pw in powers:
            val = 0
            for f, gp in zip(coeffs, pw):
                val ^= gf16_mul(f, gp)
            rows.append(val)
        out.append(MatRows(2, spec.m, tuple(rows)))
    return out


def rank_distance(a: MatRows, b: MatRows) -> int:
    return rank_bits(x ^ y for x, y in zip(a.rows, b.rows))


def lift(matrices: list[MatRows], v: int) -> SubspaceCode:
    """Row spaces of [I_n | A] in F_2^v, one per matrix A (n x (v-n))."""
    words = []
    for a in matrices:
        n = a.nrows
        if a.q != 2 or a.cols != v - n:
            raise ConstructionError(f"matrix of shape {n}x{a.cols} cannot be lifted into F_2^{v}")
        words.append(Subspace(2, v, MatRows(2, v, tuple((1 << i) | (r << n) for i, r in enumerate(a.rows)))))
    return SubspaceCode(2, v, words)


def plus_one(c: SubspaceCode) -> SubspaceCode:
    """Add the span of the last n standard basis vectors to a lifted code."""
    if not c.is_constant_dimension or len(c) == 0:
        raise ConstructionError("plus_one expects a non-empty constant-dimension lifted code")
    (n,) = c.dimensions
    v = c.v
    if v - n < n:
        raise ConstructionError(f"no {n}-space fits in the last {v - n} coordinates")
    extra = Subspace.standard(c.q, v, range(v - n, v))
    if extra in c:
        raise ConstructionError(f"{extra} is already a codeword")
    d_old = c.min_distance
    for u in c:
        d = 2 * rank_bits(u.rows + extra.rows) - u.k - extra.k
        if d_old is not None and d < d_old:
            raise ConstructionError(f"{extra} is at distance {d} < {d_old} from {u}")
    return c.union([extra])


def lifted_mrd(v: int, k: int, d: int) -> SubspaceCode:
    """Lifted Gabidulin code of k-spaces in F_2^v with subspace distance d."""
    if v - k != M:
        raise ConstructionError(f"the F_16 construction needs v - k = {M}, got v={v}, k={k}")
    if d % 2 or d < 2:
        raise ConstructionError(f"subspace distance must be even and positive, got {d}")
    delta = d // 2
    spec = GabidulinSpec(n=k, k=k - delta + 1)
    return lift(mrd_matrices(spec), v)


def lifted_mrd_plus_one(v: int, k: int, d: int | None = None) -> SubspaceCode:
    if d is None:
        d = 6
    return plus_one(lifted_mrd(v, k, d))
