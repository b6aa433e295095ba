"""Binary linear programs for constant-dimension codes.

Models are stored in compressed sparse row form: constraint ``i`` owns the
entries ``indptr[i]:indptr[i+1]`` of ``indices``/``coefs``. Variables are
named ``x_<enumeration index>`` (subspaces) and ``y_<point index>``.

LP text subset written by :func:`export_model` and read by :func:`parse_lp`::

    model    := comment* "Maximize" NL " obj:" terms NL
                "Subject To" NL (" " name ":" terms rel int NL)*
                ["Bounds" NL (" " bound NL)*]
                ["Binary" NL (" " name+ NL)*] "End" NL
    terms    := term+ (continuation lines start with two spaces)
    term     := ("+" | "-") [int] name
    rel      := "<=" | "="
    bound    := name "=" int | "0 <=" name "<= 1"
    comment  := "\\" text NL
"""

from __future__ import annotations

import hashlib
import itertools
import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from .bounds import BoundsDb, upper_bound
from .clique_engine import ConflictGraph, CliqueResult, candidate_set, max_clique, meet_graph
from .codes import SubspaceCode
from .errors import BoundDomainError, CapExceeded, ModelError, PrescriptionConflict, SolutionError
from .grassmann import (
    MATERIALIZE_CAP,
    Subspace,
    all_subspaces,
    bases_array,
    combine_rows,
    dual,
    enumerate_subspaces,
    gaussian_binomial,
    indices_of_bases,
    iter_bases,
    rref_rows_np,
    subspace_distance,
)

TERMS_PER_LINE = 10
GENERIC_PAIR_CAP = 20_000_000


@dataclass(frozen=True)
class ModelStats:
    variables: int
    constraints: int
    nonzeros: int

    def __str__(self) -> str:
        return f"{self.variables} variables, {self.constraints} constraints, {self.nonzeros} nonzeros"


@dataclass(frozen=True)
class Constraint:
    name: str
    indices: np.ndarray
    coefs: np.ndarray
    sense: str  # "<=" or "="
    rhs: int


@dataclass(frozen=True, eq=False)
class IlpModel:
    """Maximization BLP over named binary variables."""

    var_names: tuple[str, ...]
    objective: np.ndarray
    con_names: tuple[str, ...]
    senses: tuple[str, ...]
    rhs: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    coefs: np.ndarray
    fixings: dict[int, int] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        nv, nc = len(self.var_names), len(self.con_names)
        if len(set(self.var_names)) != nv:
            raise ModelError("variable names must be unique")
        if self.objective.shape != (nv,) or self.rhs.shape != (nc,) or len(self.senses) != nc:
            raise ModelError("inconsistent model arrays")
        if self.indptr.shape != (nc + 1,) or self.indptr[-1] != len(self.indices) or len(self.coefs) != len(self.indices):
            raise ModelError("inconsistent sparse structure")
        for j, val in self.fixings.items():
            if val not in (0, 1):
                raise ModelError(f"fixing {self.var_names[j]} = {val} is not binary")
            if val == 1 and self.objective[j] == 0:
                raise ModelError(f"{self.var_names[j]} fixed to 1 but absent from the objective")

    @property
    def stats(self) -> ModelStats:
        return ModelStats(len(self.var_names), len(self.con_names), int(len(self.indices)))

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    def var_index(self, name: str) -> int:
        lookup = self.meta.get("_lookup")
        if lookup is None:
            lookup = {n: i for i, n in enumerate(self.var_names)}
            self.meta["_lookup"] = lookup
        try:
            return lookup[name]
        except KeyError:
            raise SolutionError(f"unknown variable {name!r}") from None

    def constraint(self, i: int) -> Constraint:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return Constraint(self.con_names[i], self.indices[lo:hi], self.coefs[lo:hi], self.senses[i], int(self.rhs[i]))

    def constraints(self) -> Iterable[Constraint]:
        for i in range(len(self.con_names)):
            yield self.constraint(i)


# ------------------------------------------------------------- incidences


def _sub_incidences(bases: np.ndarray, v: int, a: int) -> np.ndarray:
    """(N, [k a]) indices of all a-subspaces of each F_2 span in ``bases``."""
    n, k = bases.shape
    coeff_spaces = list(iter_bases(2, k, a))
    out = np.empty((n, len(coeff_spaces)), dtype=np.int64)
    for j, coeffs in enumerate(coeff_spaces):
        out[:, j] = indices_of_bases(combine_rows(bases, coeffs), v)
    return out


def dual_bases_np(bases: np.ndarray, v: int) -> np.ndarray:
    """Bases of the orthogonal complements of many full-rank F_2 bases."""
    red = rref_rows_np(bases, v)
    n, k = red.shape
    piv = np.zeros((n, k), dtype=np.int64)
    for i in range(k):
        low = red[:, i] & -red[:, i]
        piv[:, i] = np.log2(low).astype(np.int64)
    pmask = np.zeros(n, dtype=np.int64)
    for i in range(k):
        pmask |= np.int64(1) << piv[:, i]
    vecs = np.zeros((n, v), dtype=np.int64)
    for c in range(v):
        col = np.int64(1) << c
        for i in range(k):
            vecs[:, c] |= ((red[:, i] >> c) & 1) << piv[:, i]
        vecs[:, c] |= col
    keep = ((pmask[:, None] >> np.arange(v)[None, :]) & 1) == 0
    return vecs[keep].reshape(n, v - k)


def _pairs_q2(v: int, k: int, a: int) -> tuple[np.ndarray, np.ndarray]:
    """(constraint subspace index, variable index) pairs for F_2 incidences."""
    bases = bases_array(2, v, k)
    n = len(bases)
    if a < k:
        sub = _sub_incidences(bases, v, a)
        cons = sub.ravel()
        var = np.repeat(np.arange(n, dtype=np.int64), sub.shape[1])
        return cons, var
    # U <= A  iff  A^perp <= U^perp
    duals = dual_bases_np(bases, v)
    sub = _sub_incidences(duals, v, v - a)
    b_to_a = np.array([dual(s).index for s in enumerate_subspaces(2, v, v - a)], dtype=np.int64)
    cons = b_to_a[sub.ravel()]
    var = np.repeat(np.arange(n, dtype=np.int64), sub.shape[1])
    return cons, var


def _pairs_generic(q: int, v: int, k: int, a: int) -> tuple[np.ndarray, np.ndarray]:
    """Same pairs by span-mask containment; any q, small instances only."""
    big = all_subspaces(q, v, k)
    small = all_subspaces(q, v, a)
    if len(big) * len(small) > GENERIC_PAIR_CAP:
        raise CapExceeded(f"{len(big)} x {len(small)} incidence scan exceeds {GENERIC_PAIR_CAP}")
    cons, var = [], []
    bm = [u.span_mask for u in big]
    for s in small:
        sm = s.span_mask
        for j, m in enumerate(bm):
            if (a < k and sm & m == sm) or (a > k and sm & m == m):
                cons.append(s.index)
                var.append(j)
    return np.array(cons, dtype=np.int64), np.array(var, dtype=np.int64)


def incidence_pairs(q: int, v: int, k: int, a: int, generic: bool = False) -> tuple[np.ndarray, np.ndarray]:
    if a == k or not 0 < a < v:
        raise ModelError(f"incidence dimension a={a} must differ from k={k} and lie in 1..{v - 1}")
    if q == 2 and not generic:
        return _pairs_q2(v, k, a)
    return _pairs_generic(q, v, k, a)


def _assemble(var_names, objective, families, fixings=None, meta=None) -> IlpModel:
    """families: list of (names, senses, rhs, cons_ids, var_ids, coefs) with cons_ids 0-based per family."""
    names: list[str] = []
    senses: list[str] = []
    rhs: list[np.ndarray] = []
    ptrs = [np.zeros(1, dtype=np.int64)]
    idx_parts, coef_parts = [], []
    offset = 0
    for fam_names, fam_senses, fam_rhs, cons, var, coef in families:
        m = len(fam_names)
        order = np.lexsort((var, cons))
        cons, var, coef = cons[order], var[order], coef[order]
        counts = np.bincount(cons, minlength=m)
        if (counts == 0).any():
            raise ModelError("empty constraint in family")
        ptrs.append(offset + np.cumsum(counts))
        offset += len(var)
        idx_parts.append(var.astype(np.int32))
        coef_parts.append(coef.astype(np.int32))
        names.extend(fam_names)
        senses.extend(fam_senses)
        rhs.append(np.asarray(fam_rhs, dtype=np.int64))
    return IlpModel(
        tuple(var_names),
        np.asarray(objective, dtype=np.int64),
        tuple(names),
        tuple(senses),
        np.concatenate(rhs) if rhs else np.zeros(0, dtype=np.int64),
        np.concatenate(ptrs),
        np.concatenate(idx_parts) if idx_parts else np.zeros(0, dtype=np.int32),
        np.concatenate(coef_parts) if coef_parts else np.zeros(0, dtype=np.int32),
        dict(fixings or {}),
        dict(meta or {}),
    )


def _family(prefix: str, cons_idx: np.ndarray, var: np.ndarray, rhs_value: int):
    """Compress subspace indices of one family to consecutive constraint ids, sorted by index."""
    uniq, local = np.unique(cons_idx, return_inverse=True)
    names = [f"{prefix}{i}" for i in uniq.tolist()]
    return names, ["<="] * len(uniq), [rhs_value] * len(uniq), local.astype(np.int64), var, np.ones(len(var), np.int64)


def full_model_dimensions(v: int, d: int, k: int, full_constraints: bool = False) -> list[tuple[int, str]]:
    """Incidence dimensions a with their rhs kind: 'contain', 'one' or 'inside'."""
    delta = d // 2
    out: list[tuple[int, str]] = [(a, "contain") for a in range(1, k - delta + 1)]
    ones = sorted({k - delta + 1, k + delta - 1})
    if full_constraints:
        ones = list(range(k - delta + 1, k + delta))
    out += [(a, "one") for a in ones if a != k and 0 < a < v]
    out += [(a, "inside") for a in range(k + delta, v)]
    return sorted(out)


def build_full_model(
    q: int, v: int, d: int, k: int, db: BoundsDb | None = None, full_constraints: bool = False,
    generic: bool = False,
) -> IlpModel:
    """The incidence BLP whose optimum is A_q(v, d; k)."""
    if d % 2 or not 2 <= d <= 2 * k <= v:
        raise ModelError(f"need even d with 2 <= d <= 2k <= v, got v={v}, d={d}, k={k}")
    n = gaussian_binomial(v, k, q)
    if n > MATERIALIZE_CAP:
        raise CapExceeded(f"[{v} {k}]_{q} = {n} variables exceed the cap {MATERIALIZE_CAP}")
    families = []
    rhs_log = []
    for a, kind in full_model_dimensions(v, d, k, full_constraints):
        try:
            if kind == "contain":
                res = upper_bound(q, v - a, d, k - a, db)
            elif kind == "inside":
                res = upper_bound(q, a, d, k, db)
            else:
                res = None
        except BoundDomainError as exc:
            raise ModelError(f"cannot resolve the rhs for a={a}: {exc}") from exc
        rhs_value = 1 if res is None else res.value
        rhs_log.append((a, kind, rhs_value, "1 (two codewords incident to one such space are too close)" if res is None else res.render()))
        cons, var = incidence_pairs(q, v, k, a, generic)
        families.append(_family(f"c{a}_", cons, var, rhs_value))
    var_names = [f"x_{i}" for i in range(n)]
    meta = {"kind": "full", "q": q, "v": v, "d": d, "k": k, "rhs_log": rhs_log}
    return _assemble(var_names, np.ones(n, np.int64), families, meta=meta)


# ------------------------------------------------------------ prescription


def _var_of_subspace(model: IlpModel, u: Subspace) -> int:
    m = model.meta
    if (u.q, u.v, u.k) != (m.get("q"), m.get("v"), m.get("k")):
        raise ModelError(f"{u} is not a {m.get('k')}-subspace of F_{m.get('q')}^{m.get('v')}")
    label_map = m.get("label_to_var")
    if label_map is None:
        return u.index
    if u.index not in label_map:
        raise ModelError(f"{u} is not a variable of this model")
    return label_map[u.index]


def prescribe(model: IlpModel, codewords: Iterable[Subspace]) -> IlpModel:
    """Fix x_U = 1 for the given subspaces."""
    words = list(codewords)
    if not words:
        return model
    d = model.meta.get("d")
    for u, w in itertools.combinations(words, 2):
        if u == w:
            raise PrescriptionConflict(f"{u} prescribed twice")
        if d is not None and subspace_distance(u, w) < d:
            raise PrescriptionConflict(f"{u} and {w} are at distance {subspace_distance(u, w)} < {d}")
    fixings = dict(model.fixings)
    for u in words:
        j = _var_of_subspace(model, u)
        if fixings.get(j) == 0:
            raise PrescriptionConflict(f"{model.var_names[j]} is already fixed to 0")
        fixings[j] = 1
    ones = np.zeros(model.num_vars, dtype=np.int64)
    for j, val in fixings.items():
        ones[j] = val
    lhs = _row_sums(model, ones)
    bad = np.flatnonzero((lhs > model.rhs) & np.array([s == "<=" for s in model.senses]))
    if len(bad):
        i = int(bad[0])
        raise PrescriptionConflict(f"prescribed codewords violate {model.con_names[i]}: {lhs[i]} > {model.rhs[i]}")
    meta = {k: v for k, v in model.meta.items() if k != "_lookup"}
    return replace(model, fixings=fixings, meta=meta)


# ---------------------------------------------------------- extension model


def _check_solids(f: SubspaceCode, strict: bool) -> None:
    if (f.q, f.v) != (2, 7):
        raise ModelError(f"extension model needs codewords in F_2^7, got F_{f.q}^{f.v}")
    if len(f) and f.dimensions != frozenset([4]):
        raise ModelError(f"extension model needs solids, got dimensions {sorted(f.dimensions)}")
    if strict and len(f) > 1 and f.min_distance < 6:
        raise ModelError(f"codewords must pairwise meet in at most a point (d >= 6), got d = {f.min_distance}")


def build_extension_model(f: SubspaceCode, strict: bool = True) -> tuple[IlpModel, list[Subspace], ConflictGraph]:
    """Plane-packing BLP over A(F) = planes meeting every solid of F in at most a point.

    Returns the model, A(F) and the compatibility graph (edges between planes
    sharing no line); the BLP optimum equals that graph's clique number.
    ``strict=False`` accepts any set of solids.
    """
    _check_solids(f, strict)
    cands = candidate_set(f, 2, 7, 3, 1)
    labels = [u.index for u in cands]
    n = len(cands)
    families = []
    if n:
        bases = np.array([u.rows for u in cands], dtype=np.int64)
        sub = _sub_incidences(bases, 7, 2)
        cons = sub.ravel()
        var = np.repeat(np.arange(n, dtype=np.int64), sub.shape[1])
        families.append(_family("l_", cons, var, 1))
    meta = {"kind": "extension", "q": 2, "v": 7, "d": 4, "k": 3,
            "label_to_var": {lab: i for i, lab in enumerate(labels)}, "F_size": len(f)}
    model = _assemble([f"x_{i}" for i in labels], np.ones(n, np.int64), families, meta=meta)
    graph = meet_graph(cands, 1, labels)
    return model, cands, graph


# ------------------------------------------------------------- blow-up model


def build_blowup_model(f3: SubspaceCode, f4: SubspaceCode, db: BoundsDb | None = None) -> IlpModel:
    """Solid-code BLP in F_2^8 that contains F_4 and a cone over F_3.

    F_3 and F_4 live in F_2^7, embedded as the hyperplane with last coordinate
    zero. The y_P select one point P off that hyperplane, and the solids
    <U, P> for U in F_3 are forced into the code.
    """
    for c, dim, size in ((f3, 3, 17), (f4, 4, 16)):
        if (c.q, c.v) != (2, 7) or c.dimensions != frozenset([dim]) or len(c) != size or c.min_distance < 6:
            raise ModelError(f"expected a (7,{size},6;{dim})_2 code, got {c!r}")
    base = build_full_model(2, 8, 6, 4, db)
    n = base.num_vars
    # points of F_2^8 with coordinate 8 set; RREF rows are the vectors themselves
    pts = [p for p in enumerate_subspaces(2, 8, 1) if p.rows[0] >> 7 & 1]
    y_names = [f"y_{p.index}" for p in pts]
    link_rows = np.array([[u.rows[0], u.rows[1], u.rows[2], p.rows[0]] for p in pts for u in f3], dtype=np.int64)
    link_idx = indices_of_bases(link_rows, 8).reshape(len(pts), len(f3))
    cons = np.concatenate([np.repeat(np.arange(len(pts)), len(f3)), np.arange(len(pts))])
    var = np.concatenate([link_idx.ravel(), n + np.arange(len(pts))])
    coef = np.concatenate([np.ones(link_idx.size, np.int64), -np.ones(len(pts), np.int64)])
    link = ([f"link_{p.index}" for p in pts], ["="] * len(pts), [0] * len(pts), cons, var, coef)
    ysum = (["ysum"], ["="], [1], np.zeros(len(pts), np.int64), n + np.arange(len(pts)), np.ones(len(pts), np.int64))
    fam = [
        (list(base.con_names), list(base.senses), base.rhs,
         np.repeat(np.arange(len(base.con_names)), np.diff(base.indptr)), base.indices.astype(np.int64),
         base.coefs.astype(np.int64)),
        link,
        ysum,
    ]
    fixings = {}
    for u in f4:
        w = Subspace.from_rows(2, 8, u.rows)
        fixings[w.index] = 1
    objective = np.concatenate([np.ones(n, np.int64), np.zeros(len(pts), np.int64)])
    meta = {"kind": "blowup", "q": 2, "v": 8, "d": 6, "k": 4, "rhs_log": base.meta["rhs_log"], "points": len(pts)}
    return _assemble(list(base.var_names) + y_names, objective, fam, fixings=fixings, meta=meta)


# ----------------------------------------------------------------- export


def _terms(names: Sequence[str], idx: np.ndarray, coefs: np.ndarray) -> list[str]:
    out = []
    for j, c in zip(idx.tolist(), coefs.tolist()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        out.append(f"{sign} {names[j]}" if mag == 1 else f"{sign} {mag} {names[j]}")
    return out


def _wrap(head: str, terms: list[str], tail: str = "") -> str:
    lines = []
    for lo in range(0, max(len(terms), 1), TERMS_PER_LINE):
        chunk = " ".join(terms[lo : lo + TERMS_PER_LINE])
        lines.append(("  " if lo else head) + chunk)
    if tail:
        lines[-1] += " " + tail
    return "\n".join(lines) + "\n"


def _write_model(model: IlpModel, out: TextIO, relaxed: bool) -> None:
    names = model.var_names
    m = model.meta
    out.write(f"\\ kind={m.get('kind', 'custom')} q={m.get('q')} v={m.get('v')} d={m.get('d')} k={m.get('k')}\n")
    out.write(f"\\ {model.stats}\n")
    for a, kind, value, text in m.get("rhs_log", []):
        first = text.splitlines()[0]
        out.write(f"\\ rhs a={a} ({kind}): {first}\n")
    out.write("Maximize\n")
    obj = np.flatnonzero(model.objective)
    out.write(_wrap(" obj: ", _terms(names, obj, model.objective[obj])))
    out.write("Subject To\n")
    for c in model.constraints():
        op = "<=" if c.sense == "<=" else "="
        out.write(_wrap(f" {c.name}: ", _terms(names, c.indices, c.coefs), f"{op} {c.rhs}"))
    fixed = sorted(model.fixings.items())
    if fixed or relaxed:
        out.write("Bounds\n")
        for j, val in fixed:
            out.write(f" {names[j]} = {val}\n")
        if relaxed:
            for j in range(model.num_vars):
                if j not in model.fixings:
                    out.write(f" 0 <= {names[j]} <= 1\n")
    if not relaxed:
        out.write("Binary\n")
        for lo in range(0, model.num_vars, TERMS_PER_LINE):
            out.write(" " + " ".join(names[lo : lo + TERMS_PER_LINE]) + "\n")
    out.write("End\n")


class _Collect:
    def __init__(self) -> None:
        self.parts: list[str] = []

    def write(self, s: str) -> None:
        self.parts.append(s)


class _Hasher:
    def __init__(self) -> None:
        self.h = hashlib.sha256()
        self.size = 0

    def write(self, s: str) -> None:
        b = s.encode()
        self.size += len(b)
        self.h.update(b)


def export_model(model: IlpModel, out: TextIO | None = None) -> str | None:
    """LP text of the model; written to ``out`` if given, else returned."""
    if out is not None:
        _write_model(model, out, relaxed=False)
        return None
    buf = _Collect()
    _write_model(model, buf, relaxed=False)  # type: ignore[arg-type]
    return "".join(buf.parts)


def relax_note(model: IlpModel, out: TextIO | None = None) -> str | None:
    """LP relaxation text: the Binary section becomes 0 <= x <= 1 bounds."""
    if out is not None:
        _write_model(model, out, relaxed=True)
        return None
    buf = _Collect()
    _write_model(model, buf, relaxed=True)  # type: ignore[arg-type]
    return "".join(buf.parts)


def export_digest(model: IlpModel, relaxed: bool = False) -> tuple[str, int]:
    """SHA-256 hex digest and byte size of the export, without keeping the text."""
    h = _Hasher()
    _write_model(model, h, relaxed)  # type: ignore[arg-type]
    return h.h.hexdigest(), h.size


_TERM = re.compile(r"([+-])\s*(\d+)?\s*([A-Za-z_][\w.]*)")


def parse_lp(text: str) -> IlpModel:
    """Read the LP subset written by :func:`export_model`."""
    section = None
    var_names: list[str] = []
    lookup: dict[str, int] = {}
    obj: dict[int, int] = {}
    cons: list[tuple[str, list[tuple[int, int]], str, int]] = []
    fixings: dict[int, int] = {}
    pending: list[str] = []

    def var(name: str) -> int:
        j = lookup.get(name)
        if j is None:
            j = lookup[name] = len(var_names)
            var_names.append(name)
        return j

    def terms(body: str, lineno: int) -> list[tuple[int, int]]:
        body = body.strip()
        if body and body[0] not in "+-":
            body = "+ " + body
        pos, out = 0, []
        for mt in _TERM.finditer(body):
            if body[pos : mt.start()].strip():
                raise ModelError(f"line {lineno}: cannot parse {body[pos:mt.start()]!r}")
            out.append((var(mt.group(3)), (-1 if mt.group(1) == "-" else 1) * int(mt.group(2) or 1)))
            pos = mt.end()
        if body[pos:].strip():
            raise ModelError(f"line {lineno}: cannot parse {body[pos:]!r}")
        return out

    def flush(lineno: int) -> None:
        if not pending:
            return
        stmt = " ".join(pending)
        pending.clear()
        name, _, body = stmt.partition(":")
        if section == "obj":
            for j, c in terms(body, lineno):
                obj[j] = obj.get(j, 0) + c
            return
        mt = re.match(r"(.*?)(<=|=)\s*(-?\d+)\s*$", body)
        if not mt:
            raise ModelError(f"line {lineno}: constraint {name.strip()} lacks a relation")
        cons.append((name.strip(), terms(mt.group(1), lineno), mt.group(2), int(mt.group(3))))

    headers = {"maximize": "obj", "subject to": "st", "bounds": "bounds", "binary": "binary", "end": "end"}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("\\") or not raw.strip():
            continue
        key = raw.strip().lower()
        if key in headers:
            flush(lineno)
            section = headers[key]
            continue
        if section in ("obj", "st"):
            if raw.startswith("  ") and pending:
                pending.append(raw.strip())
            else:
                flush(lineno)
                pending.append(raw.strip())
        elif section == "bounds":
            parts = raw.split()
            if len(parts) == 3 and parts[1] == "=":
                fixings[var(parts[0])] = int(parts[2])
            elif len(parts) == 5 and parts[0] == "0" and parts[4] == "1":
                var(parts[2])
            else:
                raise ModelError(f"line {lineno}: unsupported bound {raw.strip()!r}")
        elif section == "binary":
            for name in raw.split():
                var(name)
        elif section == "end":
            raise ModelError(f"line {lineno}: content after End")
        else:
            raise ModelError(f"line {lineno}: content outside any section")
    flush(len(text.splitlines()))
    if section != "end":
        raise ModelError("missing End")
    n = len(var_names)
    objective = np.zeros(n, np.int64)
    for j, c in obj.items():
        objective[j] = c
    fam_c, fam_v, fam_k = [], [], []
    for i, (_, ts, _, _) in enumerate(cons):
        for j, c in ts:
            fam_c.append(i)
            fam_v.append(j)
            fam_k.append(c)
    fam = ([c[0] for c in cons], [c[2] for c in cons], [c[3] for c in cons],
           np.array(fam_c, np.int64), np.array(fam_v, np.int64), np.array(fam_k, np.int64))
    return _assemble(var_names, objective, [fam] if cons else [], fixings=fixings, meta={"kind": "parsed"})


# --------------------------------------------------------------- solutions


def import_solution(model: IlpModel, text: str) -> dict[int, Fraction]:
    """Read ``name value`` lines; values are exact decimals or fractions in [0, 1]."""
    out: dict[int, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolutionError(f"line {lineno}: expected 'name value', got {line!r}")
        try:
            j = model.var_index(parts[0])
        except SolutionError as exc:
            raise SolutionError(f"line {lineno}: {exc.args[0]}") from None
        try:
            val = Fraction(parts[1])
        except (ValueError, ZeroDivisionError):
            raise SolutionError(f"line {lineno}: bad value {parts[1]!r}") from None
        if not 0 <= val <= 1:
            raise SolutionError(f"line {lineno}: value {parts[1]} of {parts[0]} outside [0, 1]")
        if j in out and out[j] != val:
            raise SolutionError(f"line {lineno}: {parts[0]} assigned twice")
        out[j] = val
    return out


def solution_text(model: IlpModel, assignment: dict[int, Fraction | int]) -> str:
    return "".join(f"{model.var_names[j]} {assignment[j]}\n" for j in sorted(assignment) if assignment[j] != 0)


@dataclass
class SolutionReport:
    feasible: bool
    objective: Fraction
    fractional: bool
    violations: list[str]

    def lines(self) -> list[str]:
        kind = "LP-relaxation point" if self.fractional else "integer point"
        head = f"{'feasible' if self.feasible else 'INFEASIBLE'} {kind}, objective {self.objective}"
        if self.fractional:
            head += f" (= {float(self.objective):.6f})"
        return [head] + [f"  violated: {v}" for v in self.violations]


def _row_sums(model: IlpModel, vals: np.ndarray) -> np.ndarray:
    prod = vals[model.indices] * model.coefs.astype(vals.dtype)
    cs = np.concatenate([np.zeros(1, dtype=vals.dtype), np.cumsum(prod)])
    return cs[model.indptr[1:]] - cs[model.indptr[:-1]]


def check_solution(model: IlpModel, assignment: dict[int, Fraction | int]) -> SolutionReport:
    """Exact feasibility check and objective; missing variables count as 0."""
    denom = 1
    for val in assignment.values():
        denom = math.lcm(denom, Fraction(val).denominator)
    fractional = denom != 1
    big = denom * max(1, int(np.abs(model.coefs).max(initial=1))) * max(1, model.num_vars) >= 2**62
    dtype = object if big else np.int64
    vals = np.zeros(model.num_vars, dtype=dtype)
    if big:
        vals[:] = 0
    for j, val in assignment.items():
        fv = Fraction(val)
        vals[j] = int(fv * denom)
    lhs = _row_sums(model, vals)
    rhs = model.rhs.astype(dtype) * denom
    violations = []
    le = np.array([s == "<=" for s in model.senses], dtype=bool)
    bad = np.flatnonzero(np.where(le, lhs > rhs, lhs != rhs)) if len(lhs) else []
    for i in bad:
        i = int(i)
        violations.append(
            f"{model.con_names[i]}: {Fraction(int(lhs[i]), denom)} {'>' if le[i] else '!='} {model.rhs[i]}"
        )
    for j, val in sorted(model.fixings.items()):
        if Fraction(assignment.get(j, 0)) != val:
            violations.append(f"fixing {model.var_names[j]} = {val}: got {assignment.get(j, 0)}")
    obj = Fraction(int((vals * model.objective.astype(dtype)).sum()), denom)
    return SolutionReport(not violations, obj, fractional, violations)


def incidence_assignment(model: IlpModel, words: Iterable[Subspace]) -> dict[int, int]:
    """0/1 assignment selecting the variables of the given subspaces."""
    return {_var_of_subspace(model, u): 1 for u in words}


# ---------------------------------------------------------- clique solving


def packing_graph(model: IlpModel) -> ConflictGraph:
    """Compatibility graph of a set-packing model (all rows ``sum x <= 1``)."""
    if model.fixings:
        raise ModelError("set-packing route does not take fixings")
    if (model.coefs != 1).any() or (model.rhs != 1).any() or any(s != "<=" for s in model.senses):
        raise ModelError("model is not a set-packing program (all rows must read sum x <= 1)")
    if (model.objective != 1).any():
        raise ModelError("set-packing route needs unit objective")
    n = model.num_vars
    full = (1 << n) - 1
    conflict = [0] * n
    for c in model.constraints():
        idx = c.indices.tolist()
        mask = 0
        for j in idx:
            mask |= 1 << j
        for j in idx:
            conflict[j] |= mask
    adj = [full & ~row for row in conflict]
    for j in range(n):
        adj[j] &= ~(1 << j)
    return ConflictGraph(adj)


def solve_set_packing(model: IlpModel, **clique_kwargs) -> tuple[CliqueResult, dict[int, int]]:
    """Exact (or anytime) optimum of a set-packing BLP via maximum clique."""
    g = packing_graph(model)
    res = max_clique(g, **clique_kwargs)
    return res, {j: 1 for j in res.clique}
