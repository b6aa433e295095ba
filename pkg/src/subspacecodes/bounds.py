"""Upper bounds on A_q(v, d; K) in exact integer and rational arithmetic.

The resolver :func:`upper_bound` combines a table of known values with the
recursive Johnson bound, the partial-spread values and the orthogonal
symmetry A_q(v,d;k) = A_q(v,d;v-k). Every result carries a derivation that
names each table entry and formula it used.

Table file format, one record per line::

    q v d K lower upper # provenance

with ``K`` comma-joined and ``-`` for an unknown bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import BoundDomainError
from .grassmann import gaussian_binomial

METHODS = (
    "johnson",
    "partial_spread",
    "degree",
    "double_count",
    "one_incidence",
    "pair_threshold",
    "db_lookup",
    "trivial",
)

Key = tuple[int, int, int, frozenset]


@dataclass(frozen=True)
class Record:
    lower: int | None
    upper: int | None
    provenance: str = ""

    @property
    def exact(self) -> bool:
        return self.lower is not None and self.lower == self.upper


def _fmt_k(K: Iterable[int]) -> str:
    return ",".join(str(k) for k in sorted(K))


def _fmt_a(q: int, v: int, d: int, K: Iterable[int]) -> str:
    ks = sorted(K)
    kk = str(ks[0]) if len(ks) == 1 else "{" + _fmt_k(ks) + "}"
    return f"A_{q}({v},{d};{kk})"


class BoundsDb:
    """Known lower/upper bounds keyed by (q, v, d, K)."""

    def __init__(self, records: dict[Key, Record] | None = None) -> None:
        self._records: dict[Key, Record] = {}
        self._cache: dict[tuple[int, int, int, int], "BoundResult"] = {}
        for key, rec in (records or {}).items():
            self.add(*key, rec)

    def add(self, q: int, v: int, d: int, K: Iterable[int], rec: Record) -> None:
        if rec.lower is not None and rec.upper is not None and rec.lower > rec.upper:
            raise BoundDomainError(f"{_fmt_a(q, v, d, K)}: lower {rec.lower} > upper {rec.upper}")
        self._records[(q, v, d, frozenset(K))] = rec
        self._cache.clear()

    def __len__(self) -> int:
        return len(self._records)

    def items(self):
        return sorted(self._records.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2], sorted(kv[0][3])))

    def get(self, q: int, v: int, d: int, K: Iterable[int]) -> tuple[Key, Record] | None:
        """Look up K, falling back to the orthogonal dimension set v - K."""
        K = frozenset(K)
        for kk in (K, frozenset(v - k for k in K)):
            rec = self._records.get((q, v, d, kk))
            if rec is not None:
                return (q, v, d, kk), rec
        return None

    @classmethod
    def loads(cls, text: str) -> "BoundsDb":
        db = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            body, _, prov = raw.partition("#")
            parts = body.split()
            if not parts:
                continue
            if len(parts) != 6:
                raise BoundDomainError(f"bounds table line {lineno}: expected 6 fields, got {len(parts)}")
            try:
                q, v, d = int(parts[0]), int(parts[1]), int(parts[2])
                K = [int(x) for x in parts[3].split(",")]
                lo = None if parts[4] == "-" else int(parts[4])
                hi = None if parts[5] == "-" else int(parts[5])
            except ValueError:
                raise BoundDomainError(f"bounds table line {lineno}: non-integer field") from None
            db.add(q, v, d, K, Record(lo, hi, prov.strip()))
        return db

    def dumps(self) -> str:
        lines = []
        for (q, v, d, K), rec in self.items():
            lo = "-" if rec.lower is None else str(rec.lower)
            hi = "-" if rec.upper is None else str(rec.upper)
            line = f"{q} {v} {d} {_fmt_k(K)} {lo} {hi}"
            if rec.provenance:
                line += f" # {rec.provenance}"
            lines.append(line)
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, path: str | Path) -> "BoundsDb":
        return cls.loads(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def seeded(cls) -> "BoundsDb":
        text = resources.files("subspacecodes").joinpath("data/known_bounds.txt").read_text(encoding="utf-8")
        return cls.loads(text)


@dataclass(frozen=True)
class BoundResult:
    value: int
    method: str
    derivation: tuple[str, ...]
    db_entries: frozenset = field(default_factory=frozenset)

    @property
    def unconditioned(self) -> bool:
        """True when no table entry was used anywhere in the chain."""
        return not self.db_entries

    def render(self) -> str:
        tag = " [unconditioned]" if self.unconditioned and self.method != "db_lookup" else ""
        return "\n".join([f"{self.value} ({self.method}){tag}"] + [f"  {s}" for s in self.derivation])


def _validate(q: int, v: int, d: int, k: int) -> None:
    if q < 2:
        raise BoundDomainError(f"q={q} must be at least 2")
    if not 0 <= k <= v:
        raise BoundDomainError(f"need 0 <= k <= v, got v={v}, k={k}")
    if d < 1:
        raise BoundDomainError(f"d={d} must be positive")


def upper_bound(q: int, v: int, d: int, k: int, db: BoundsDb | None = None) -> BoundResult:
    """Best available upper bound on A_q(v, d; k) for constant dimension k."""
    _validate(q, v, d, k)
    db = db if db is not None else _default_db()
    key = (q, v, d, k)
    hit = db._cache.get(key)
    if hit is None:
        hit = _resolve(q, v, d, k, db)
        db._cache[key] = hit
    return hit


def _resolve(q: int, v: int, d: int, k: int, db: BoundsDb) -> BoundResult:
    name = _fmt_a(q, v, d, [k])
    if d % 2:
        inner = upper_bound(q, v, d + 1, k, db)
        return BoundResult(
            inner.value,
            inner.method,
            (f"{name} = {_fmt_a(q, v, d + 1, [k])} (constant-dimension distances are even)",) + inner.derivation,
            inner.db_entries,
        )
    kk = min(k, v - k)
    if kk == 0 or d > 2 * kk:
        return BoundResult(1, "trivial", (f"{name} = 1 (any two distinct {k}-spaces of F_{q}^{v} are at distance <= {2 * kk})",))
    found = db.get(q, v, d, [k])
    if found is not None and found[1].exact:
        (_, _, _, K), rec = found
        via = "" if K == frozenset([k]) else f" via orthogonal {_fmt_a(q, v, d, K)}"
        return BoundResult(
            rec.upper, "db_lookup", (f"{name} = {rec.upper} [table{via}: {rec.provenance}]",), frozenset([found[0]])
        )
    candidates: list[BoundResult] = []
    if found is not None and found[1].upper is not None:
        rec = found[1]
        candidates.append(
            BoundResult(rec.upper, "db_lookup", (f"{name} <= {rec.upper} [table: {rec.provenance}]",), frozenset([found[0]]))
        )
    if d == 2 * kk:
        spread = _spread_value(q, v, kk)
        if spread is not None:
            candidates.append(spread)
    if kk >= 1 and d <= 2 * kk:
        candidates.append(johnson_bound(q, v, d, kk, db))
        if v - kk != kk:
            candidates.append(johnson_bound(q, v, d, v - kk, db))
    best = min(candidates, key=lambda r: (r.value, METHODS.index(r.method)))
    return best


def _spread_value(q: int, v: int, k: int) -> BoundResult | None:
    name = _fmt_a(q, v, 2 * k, [k])
    if v % k == 0:
        val = (q**v - 1) // (q**k - 1)
        return BoundResult(val, "partial_spread", (f"{name} = (q^{v}-1)/(q^{k}-1) = {val} (spread)",))
    if v % k == 1 and k >= 2:
        val = partial_spread_size(q, v, k)
        return BoundResult(val, "partial_spread", (f"{name} = (q^{v}-q)/(q^{k}-1)-q+1 = {val} (partial spread, v = 1 mod k)",))
    return None


def partial_spread_size(q: int, v: int, k: int) -> int:
    """A_q(v, 2k; k) for v = 1 (mod k), 2 <= k <= v."""
    if not 2 <= k <= v:
        raise BoundDomainError(f"need 2 <= k <= v, got k={k}, v={v}")
    if v % k != 1:
        raise BoundDomainError(f"need v = 1 (mod k), got v={v}, k={k}")
    return (q**v - q) // (q**k - 1) - q + 1


def johnson_bound(q: int, v: int, d: int, k: int, db: BoundsDb | None = None) -> BoundResult:
    """floor((q^v-1)/(q^k-1) * A_q(v-1, d; k-1)) with the inner value resolved."""
    _validate(q, v, d, k)
    if d % 2 or not 2 <= d <= 2 * k or k < 1:
        raise BoundDomainError(f"Johnson bound needs even d with 2 <= d <= 2k, got d={d}, k={k}")
    db = db if db is not None else _default_db()
    inner = upper_bound(q, v - 1, d, k - 1, db)
    num, den = q**v - 1, q**k - 1
    value = num * inner.value // den
    name = _fmt_a(q, v, d, [k])
    step = f"{name} <= floor({num}/{den} * {_fmt_a(q, v - 1, d, [k - 1])}) = floor({num}*{inner.value}/{den}) = {value} (Johnson)"
    result = BoundResult(value, "johnson", (step,) + inner.derivation, inner.db_entries)
    if d == 2 * k and v % k == 1 and k >= 2:
        ps = partial_spread_size(q, v, k)
        if ps < value:
            return BoundResult(
                ps,
                "partial_spread",
                result.derivation + (f"{name} = {ps} (partial spread, v = 1 mod k) is tighter",),
                result.db_entries,
            )
    return result


def degree_bound(q: int, v: int, d: int, k: int, dim_x: int, db: BoundsDb | None = None) -> int:
    return degree_bound_result(q, v, d, k, dim_x, db).value


def degree_bound_result(q: int, v: int, d: int, k: int, dim_x: int, db: BoundsDb | None = None) -> BoundResult:
    """Bound on |I(C,X)| for a (v,N,d;k)_q code and a subspace X of dimension ``dim_x``."""
    _validate(q, v, d, k)
    if not 0 <= dim_x <= v:
        raise BoundDomainError(f"need 0 <= dim X <= v, got {dim_x}")
    if dim_x >= k:
        inner = upper_bound(q, dim_x, d, k, db)
        how = f"|I(C,X)| <= {_fmt_a(q, dim_x, d, [k])} (codewords inside X, dim X = {dim_x} >= k)"
    else:
        inner = upper_bound(q, v - dim_x, d, k - dim_x, db)
        how = f"|I(C,X)| <= {_fmt_a(q, v - dim_x, d, [k - dim_x])} (codewords through X, quotient by X)"
    return BoundResult(inner.value, "degree", (how,) + inner.derivation, inner.db_entries)


def double_count_bound(q: int, v: int, k: int, l: int, b: int) -> int:
    """N <= [v l]_q b / [k l]_q (l <= k) or [v l]_q b / [v-k l-k]_q (l >= k), floored."""
    if not 0 <= l <= v or not 0 <= k <= v:
        raise BoundDomainError(f"need 0 <= l, k <= v, got l={l}, k={k}, v={v}")
    if b < 0:
        raise BoundDomainError(f"b={b} must be non-negative")
    num = gaussian_binomial(v, l, q) * b
    den = gaussian_binomial(k, l, q) if l <= k else gaussian_binomial(v - k, l - k, q)
    return num // den


def one_incidence_bound(q: int, k: int, c: int) -> int:
    """(q^k+1)(q^k+1-c) for a (2k, N, 2k-2; k)_q code."""
    if c < 0:
        raise BoundDomainError(f"c={c} must be non-negative")
    return (q**k + 1) * (q**k + 1 - c)


def pair_threshold(q: int, v: int, k: int, b: int) -> Fraction:
    """(q^v-1)(b-1)/(q^(v-k)+q^k-2) as an exact rational."""
    if not 1 <= k <= v - 1:
        raise BoundDomainError(f"need 1 <= k <= v-1, got k={k}, v={v}")
    return Fraction((q**v - 1) * (b - 1), q ** (v - k) + q**k - 2)


@dataclass(frozen=True)
class CascadeReport:
    q: int
    k: int
    improved_upper: int
    spread_bound: int  # floor((q^2k-1)/(q^(k-1)-1)) >= A_q(2k, 2k-2; k-1)
    left: int
    right: int
    unfloored_left: Fraction
    middle: Fraction
    holds: bool

    def lines(self) -> list[str]:
        q, k = self.q, self.k
        return [
            f"A_{q}({2 * k},{2 * k - 2};{k - 1}) <= {self.spread_bound}",
            f"(k-1) route: floor((q^{2 * k + 1}-1)/(q^{k}-1) * {self.spread_bound}) = {self.left}",
            f"(k+1) route with A_{q}({2 * k},{2 * k - 2};{k}) <= {self.improved_upper}: {self.right}",
            f"unfloored (k-1) route {self.unfloored_left} < {self.middle} = (q^{2 * k + 1}-1)/(q^{k + 1}-1) * q^{2 * k}",
            "no improvement: the (k-1) route is at least as strong" if self.holds else "chain FAILED",
        ]


def johnson_cascade_check(q: int, k: int, improved_upper: int) -> CascadeReport:
    """Check that improving A_q(2k,2k-2;k) cannot beat the Johnson route for A_q(2k+1,2k-2;k)."""
    if k < 3:
        raise BoundDomainError(f"need k >= 3, got k={k}")
    floor_lb = q ** (2 * k) + 1
    if improved_upper < floor_lb:
        raise BoundDomainError(f"improved upper bound {improved_upper} is below the known lower bound {floor_lb}")
    top = q ** (2 * k + 1) - 1
    spread = (q ** (2 * k) - 1) // (q ** (k - 1) - 1)
    left = top * spread // (q**k - 1)
    right = top * improved_upper // (q ** (k + 1) - 1)
    unfloored = Fraction(top, q**k - 1) * Fraction(q ** (2 * k) - 1, q ** (k - 1) - 1)
    middle = Fraction(top, q ** (k + 1) - 1) * q ** (2 * k)
    holds = left <= right and unfloored < middle
    return CascadeReport(q, k, improved_upper, spread, left, right, unfloored, middle, holds)


_DEFAULT: BoundsDb | None = None


def _default_db() -> BoundsDb:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = BoundsDb.seeded()
    return _DEFAULT
