"""Subspace codes: containers, verification, incidences and shortening.

Code file format::

    # comment
    q=2 v=7 [N=17] [d=6] [K=3]
    1000110,0100011,0010111
    ...

One codeword per line, rows of a basis separated by commas, each row a
length-v digit string with coordinate 1 leftmost. The optional ``N=``,
``d=`` and ``K=`` header fields state a claim that :func:`verify` checks.
Emitted files list codewords in RREF sorted by (dimension, enumeration
index) and end with a newline.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import AmbientMismatch, CodeError, CodeFormatError, DuplicateCodewordError
from .gf_linalg import MatRows, check_q, rank_bits, rref, stack_rank
from .grassmann import (
    Subspace,
    dual,
    enumerate_subspaces,
    gaussian_binomial,
    MATERIALIZE_CAP,
)
from .errors import CapExceeded

PAIRWISE_LIMIT = 5_000


class SubspaceCode:
    """A set of distinct subspaces of a common ambient space F_q^v."""

    def __init__(self, q: int, v: int, codewords: Iterable[Subspace] = ()) -> None:
        check_q(q)
        self.q, self.v = q, v
        seen: set[Subspace] = set()
        words = []
        for u in codewords:
            if u.q != q or u.v != v:
                raise AmbientMismatch(f"codeword {u} lives in F_{u.q}^{u.v}, code in F_{q}^{v}")
            if u in seen:
                raise CodeError(f"duplicate codeword {u}")
            seen.add(u)
            words.append(u)
        words.sort(key=lambda u: (u.k, u.index))
        self.codewords: tuple[Subspace, ...] = tuple(words)
        self._set = frozenset(words)

    def __len__(self) -> int:
        return len(self.codewords)

    def __iter__(self):
        return iter(self.codewords)

    def __contains__(self, u: object) -> bool:
        return u in self._set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubspaceCode):
            return NotImplemented
        return (self.q, self.v, self._set) == (other.q, other.v, other._set)

    def __hash__(self) -> int:
        return hash((self.q, self.v, self._set))

    def __repr__(self) -> str:
        return f"SubspaceCode(q={self.q}, v={self.v}, N={len(self)}, K={sorted(self.dimensions)})"

    @property
    def size(self) -> int:
        return len(self.codewords)

    @cached_property
    def dimensions(self) -> frozenset[int]:
        return frozenset(u.k for u in self.codewords)

    @property
    def is_constant_dimension(self) -> bool:
        return len(self.dimensions) == 1

    @cached_property
    def _min_pair(self) -> tuple[int, Subspace, Subspace] | None:
        return minimum_distance_pair(self)

    @property
    def min_distance(self) -> int | None:
        """Minimum pairwise subspace distance; ``None`` when N <= 1."""
        return None if self._min_pair is None else self._min_pair[0]

    def union(self, other: Iterable[Subspace]) -> "SubspaceCode":
        return SubspaceCode(self.q, self.v, list(self.codewords) + list(other))


def minimum_distance_pair(c: SubspaceCode) -> tuple[int, Subspace, Subspace] | None:
    """Exact minimum distance by a full pairwise scan, with a witness pair."""
    n = len(c)
    if n <= 1:
        return None
    if n > PAIRWISE_LIMIT:
        raise CodeError(f"N={n} exceeds the pairwise-scan limit {PAIRWISE_LIMIT}")
    words = c.codewords
    best: tuple[int, Subspace, Subspace] | None = None
    if c.q == 2:
        rows = [u.rows for u in words]
        dims = [u.k for u in words]
        for i in range(n):
            ri, ki = rows[i], dims[i]
            for j in range(i):
                d = 2 * rank_bits(ri + rows[j]) - ki - dims[j]
                if best is None or d < best[0]:
                    best = (d, words[j], words[i])
    else:
        for i in range(n):
            for j in range(i):
                d = 2 * stack_rank(words[i].basis, words[j].basis) - words[i].k - words[j].k
                if best is None or d < best[0]:
                    best = (d, words[j], words[i])
    return best


@dataclass(frozen=True)
class CodeParams:
    """A claimed parameter tuple (v, N, d; K)_q; ``None`` fields are unchecked."""

    v: int | None = None
    N: int | None = None
    d: int | None = None
    K: frozenset[int] | None = None
    q: int | None = None

    def __str__(self) -> str:
        k = "?" if self.K is None else "{" + ",".join(map(str, sorted(self.K))) + "}"
        return f"({self.v},{self.N},{self.d};{k})_{self.q}"


@dataclass
class VerifyReport:
    q: int
    v: int
    N: int
    d: int | None
    K: frozenset[int]
    constant_dimension: bool
    witness: tuple[Subspace, Subspace] | None
    claim: CodeParams | None = None
    mismatches: dict[str, tuple] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def params(self) -> str:
        ks = sorted(self.K)
        kstr = str(ks[0]) if len(ks) == 1 else "{" + ",".join(map(str, ks)) + "}"
        d = "-" if self.d is None else str(self.d)
        return f"({self.v},{self.N},{d};{kstr})_{self.q}"

    def lines(self) -> list[str]:
        out = [f"parameters {self.params()}"]
        out.append(f"constant_dimension {'yes' if self.constant_dimension else 'no'}")
        if self.d is None:
            out.append("min_distance undefined (N <= 1)")
        elif self.witness is not None:
            a, b = self.witness
            out.append(f"min_distance {self.d} attained by {a} and {b}")
        if self.claim is not None:
            out.append(f"claim {self.claim}: {'confirmed' if self.ok else 'MISMATCH'}")
            for name, (claimed, actual) in sorted(self.mismatches.items()):
                out.append(f"  {name}: claimed {claimed}, computed {actual}")
        return out


def verify(c: SubspaceCode, claim: CodeParams | None = None) -> VerifyReport:
    pair = c._min_pair
    report = VerifyReport(
        q=c.q,
        v=c.v,
        N=len(c),
        d=None if pair is None else pair[0],
        K=c.dimensions,
        constant_dimension=len(c.dimensions) == 1,
        witness=None if pair is None else (pair[1], pair[2]),
        claim=claim,
    )
    if claim is not None:
        actual = {"v": c.v, "N": len(c), "d": report.d, "K": c.dimensions, "q": c.q}
        for name, value in actual.items():
            claimed = getattr(claim, name)
            if claimed is not None and claimed != value:
                report.mismatches[name] = (claimed, value)
    return report


class DimensionDistribution(dict):
    """Map dimension -> multiplicity, rendered as ``"3^17 4^17"``."""

    def __str__(self) -> str:
        return " ".join(f"{k}^{m}" for k, m in sorted(self.items()) if m)


def dimension_distribution(c: SubspaceCode) -> DimensionDistribution:
    return DimensionDistribution(Counter(u.k for u in c.codewords))


def orthogonal_code(c: SubspaceCode) -> SubspaceCode:
    return SubspaceCode(c.q, c.v, (dual(u) for u in c.codewords))


def _is_incident(u: Subspace, x: Subspace) -> bool:
    m = u.span_mask & x.span_mask
    return m == u.span_mask or m == x.span_mask


def incidence_set(s: SubspaceCode | Iterable[Subspace], x: Subspace) -> list[Subspace]:
    """Members of ``s`` comparable with ``x`` under inclusion."""
    out = []
    for u in s:
        if u.q != x.q or u.v != x.v:
            raise AmbientMismatch(f"{u} and {x} live in different spaces")
        if _is_incident(u, x):
            out.append(u)
    return out


def incidence_profile(c: SubspaceCode, l: int, cap: int = MATERIALIZE_CAP) -> tuple[int, Counter]:
    """Max of |I(C,X)| over all l-subspaces X, with the histogram of values."""
    if not 0 <= l <= c.v:
        raise CodeError(f"need 0 <= l <= v, got l={l}")
    total = gaussian_binomial(c.v, l, c.q)
    if total > cap:
        raise CapExceeded(f"[{c.v} {l}]_{c.q} = {total} exceeds the cap {cap}")
    masks = [u.span_mask for u in c.codewords]
    hist: Counter = Counter()
    for x in enumerate_subspaces(c.q, c.v, l):
        xm = x.span_mask
        n = 0
        for um in masks:
            m = um & xm
            if m == um or m == xm:
                n += 1
        hist[n] += 1
    return max(hist), hist


def restrict_to_hyperplane(u: Subspace, h: Subspace) -> Subspace:
    """Coordinates of a subspace of ``h`` in the basis given by h's RREF rows.

    A vector of ``h`` equals sum_i x[p_i] b_i where p_i are the pivots of the
    canonical basis b of ``h``, so the re-embedding reads off those
    coordinates.
    """
    piv = h.pivots
    q, w = h.q, len(piv)
    if q == 2:
        rows = []
        for r in u.rows:
            y = 0
            for j, p in enumerate(piv):
                if (r >> p) & 1:
                    y |= 1 << j
            rows.append(y)
    else:
        rows = [bytes(r[p] for p in piv) for r in u.rows]
    if not rows:
        return Subspace.zero(q, w)
    return Subspace.from_rows(q, w, rows)


def shorten(c: SubspaceCode, p: Subspace, h: Subspace) -> SubspaceCode:
    """Shortened code {U cap H : U in I(C,P)} u I(C,H) inside H ~ F_q^(v-1)."""
    from .grassmann import contains, meet

    if p.q != c.q or p.v != c.v or h.q != c.q or h.v != c.v:
        raise AmbientMismatch("point/hyperplane must live in the code's ambient space")
    if p.k != 1:
        raise CodeError(f"P must be a point, got dimension {p.k}")
    if h.k != c.v - 1:
        raise CodeError(f"H must be a hyperplane, got dimension {h.k}")
    if contains(h, p):
        raise CodeError("P must not lie in H")
    if len(c) >= 2 and (c.min_distance or 0) < 2:
        raise CodeError("shortening needs minimum distance >= 2")
    through_p = incidence_set(c, p)
    in_h = incidence_set(c, h)
    cut = [restrict_to_hyperplane(meet(u, h), h) for u in through_p]
    kept = [restrict_to_hyperplane(u, h) for u in in_h]
    if set(cut) & set(kept) or len(set(cut)) != len(cut):
        raise CodeError("shortened parts collide; the incidence sets should be disjoint")
    return SubspaceCode(c.q, c.v - 1, cut + kept)


# ------------------------------------------------------------------- files


def _parse_row(q: int, v: int, text: str, line: int) -> list[int]:
    text = text.strip()
    if len(text) != v:
        raise CodeFormatError(f"row {text!r} has length {len(text)}, expected v={v}", line)
    try:
        entries = [int(ch) for ch in text]
    except ValueError:
        raise CodeFormatError(f"row {text!r} is not a digit string", line) from None
    if any(x >= q for x in entries):
        raise CodeFormatError(f"row {text!r} has a digit outside 0..{q - 1}", line)
    return entries


def _parse_header(text: str, line: int) -> tuple[int, int, CodeParams | None]:
    fields: dict[str, str] = {}
    for tok in text.split():
        if "=" not in tok:
            raise CodeFormatError(f"bad header token {tok!r}", line)
        key, _, val = tok.partition("=")
        fields[key] = val
    try:
        q, v = int(fields.pop("q")), int(fields.pop("v"))
    except (KeyError, ValueError):
        raise CodeFormatError("header must start with q=<q> v=<v>", line) from None
    claim = None
    if fields:
        unknown = set(fields) - {"N", "d", "K"}
        if unknown:
            raise CodeFormatError(f"unknown header fields {sorted(unknown)}", line)
        try:
            claim = CodeParams(
                v=v,
                q=q,
                N=int(fields["N"]) if "N" in fields else None,
                d=int(fields["d"]) if "d" in fields else None,
                K=frozenset(int(x) for x in fields["K"].split(",")) if "K" in fields else None,
            )
        except ValueError:
            raise CodeFormatError("non-integer claim field", line) from None
    return q, v, claim


def parse_code_with_claim(text: str) -> tuple[SubspaceCode, CodeParams | None]:
    header = None
    words: list[Subspace] = []
    first_line: dict[Subspace, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if header is None:
            header = _parse_header(body, lineno)
            try:
                check_q(header[0])
            except ValueError as exc:
                raise CodeFormatError(str(exc), lineno) from None
            continue
        q, v, _ = header
        rows = [_parse_row(q, v, part, lineno) for part in body.split(",")]
        u = Subspace(q, v, rref(MatRows.from_lists(q, rows, v))[0])
        if u in first_line:
            raise DuplicateCodewordError(
                f"duplicate codeword {u} (first seen on line {first_line[u]})", lineno
            )
        first_line[u] = lineno
        words.append(u)
    if header is None:
        raise CodeFormatError("missing header line q=<q> v=<v>")
    q, v, claim = header
    return SubspaceCode(q, v, words), claim


def parse_code(text: str) -> SubspaceCode:
    return parse_code_with_claim(text)[0]


def emit_code(c: SubspaceCode, claim: CodeParams | None = None) -> str:
    head = f"q={c.q} v={c.v}"
    if claim is not None:
        if claim.N is not None:
            head += f" N={claim.N}"
        if claim.d is not None:
            head += f" d={claim.d}"
        if claim.K is not None:
            head += " K=" + ",".join(map(str, sorted(claim.K)))
    lines = [head]
    for u in c.codewords:
        lines.append(",".join(u.row_strings()) if u.k else "0" * c.v)
    return "\n".join(lines) + "\n"
