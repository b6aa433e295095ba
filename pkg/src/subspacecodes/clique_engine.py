"""Conflict graphs over subspaces and an exact maximum-clique search.

The search is a bitset branch and bound with greedy-coloring bounds: a
coloring of the candidate set with c colors caps any clique inside it at c
vertices. Vertices are renumbered in degeneracy order first. The search state
lives in numpy arrays so it can run in bounded chunks; between chunks the
stack yields a valid global upper bound, which is what an interrupted run
reports.

Graph exchange format is DIMACS (``p edge n m`` / ``e u v``, 1-based), with
vertex labels carried in ``c label <vertex> <label>`` comment lines.
"""

from __future__ import annotations

import itertools
import multiprocessing as mp
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .codes import SubspaceCode
from .errors import CapExceeded, GraphError
from .grassmann import Subspace, all_subspaces, enumerate_subspaces, gaussian_binomial, popcount_dim
from .gf_linalg import pack_row, rref_bits

GRAPH_CAP = 40_000
CHUNK_NODES = 200_000


class ConflictGraph:
    """Undirected simple graph with one bitset (Python int) per vertex."""

    def __init__(self, adjacency: Sequence[int], labels: Sequence[int] | None = None) -> None:
        n = len(adjacency)
        self.n = n
        self.adj: list[int] = list(adjacency)
        self.labels: tuple[int, ...] = tuple(range(n)) if labels is None else tuple(labels)
        if len(self.labels) != n:
            raise GraphError("one label per vertex required")
        if len(set(self.labels)) != n:
            raise GraphError("labels must be distinct")
        self.subspaces: list[Subspace] | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels: Sequence[int] | None = None) -> "ConflictGraph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(adj, labels)

    def check(self) -> None:
        """Assert symmetry and irreflexivity."""
        for u, row in enumerate(self.adj):
            if row >> u & 1:
                raise GraphError(f"self-loop at {u}")
            if row >> self.n:
                raise GraphError(f"row {u} has bits beyond n")
            for v in _bits(row):
                if not self.adj[v] >> u & 1:
                    raise GraphError(f"asymmetric edge {u}-{v}")

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, u: int) -> int:
        return self.adj[u].bit_count()

    def neighbors(self, u: int) -> list[int]:
        return list(_bits(self.adj[u]))

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def edges(self) -> Iterable[tuple[int, int]]:
        for u, row in enumerate(self.adj):
            for v in _bits(row >> (u + 1) << (u + 1)):
                yield u, v

    def is_clique(self, vertices: Sequence[int]) -> bool:
        vs = list(vertices)
        if len(set(vs)) != len(vs):
            return False
        return all(self.adj[a] >> b & 1 for a, b in itertools.combinations(vs, 2))

    def complement(self) -> "ConflictGraph":
        full = (1 << self.n) - 1
        return ConflictGraph([(full ^ row) & ~(1 << u) for u, row in enumerate(self.adj)], self.labels)

    def induced(self, vertices: Sequence[int]) -> "ConflictGraph":
        pos = {v: i for i, v in enumerate(vertices)}
        adj = []
        for v in vertices:
            row = 0
            for u in _bits(self.adj[v]):
                j = pos.get(u)
                if j is not None:
                    row |= 1 << j
            adj.append(row)
        return ConflictGraph(adj, [self.labels[v] for v in vertices])

    def packed(self, order: Sequence[int] | None = None) -> np.ndarray:
        """(n, W) uint64 adjacency, optionally renumbered so vertex order[i] becomes i."""
        n = self.n
        W = max(1, (n + 63) // 64)
        nbytes = W * 8
        mat = np.zeros((n, W), dtype=np.uint64)
        for u, row in enumerate(self.adj):
            mat[u] = np.frombuffer(row.to_bytes(nbytes, "little"), dtype="<u8")
        if order is None:
            return mat
        order = np.asarray(order, dtype=np.int64)
        bits = np.unpackbits(mat.view(np.uint8), axis=1, bitorder="little")[:, :n]
        bits = bits[order][:, order]
        out = np.packbits(bits, axis=1, bitorder="little")
        pad = nbytes - out.shape[1]
        if pad:
            out = np.concatenate([out, np.zeros((n, pad), dtype=np.uint8)], axis=1)
        return np.ascontiguousarray(out).view(np.uint64).reshape(n, W)

    def to_dimacs(self) -> str:
        lines = [f"p edge {self.n} {self.edge_count()}"]
        for i, lab in enumerate(self.labels):
            lines.append(f"c label {i + 1} {lab}")
        for u, v in self.edges():
            lines.append(f"e {u + 1} {v + 1}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text: str) -> "ConflictGraph":
        n = None
        edges = []
        labels: dict[int, int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == "c":
                if len(parts) == 4 and parts[1] == "label":
                    labels[int(parts[2]) - 1] = int(parts[3])
                continue
            if parts[0] == "p":
                if len(parts) != 4:
                    raise GraphError(f"line {lineno}: malformed problem line")
                n = int(parts[2])
            elif parts[0] == "e":
                if n is None:
                    raise GraphError(f"line {lineno}: edge before problem line")
                u, v = int(parts[1]) - 1, int(parts[2]) - 1
                if not (0 <= u < n and 0 <= v < n):
                    raise GraphError(f"line {lineno}: vertex out of range")
                edges.append((u, v))
            else:
                raise GraphError(f"line {lineno}: unknown record {parts[0]!r}")
        if n is None:
            raise GraphError("missing problem line")
        lab = [labels.get(i, i) for i in range(n)] if labels else None
        return cls.from_edges(n, edges, lab)


def _bits(x: int) -> Iterable[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


# ------------------------------------------------------------- graph builders


def _sub_keys(u: Subspace, dim: int) -> list:
    """Canonical keys of all ``dim``-subspaces of ``u``."""
    q, k = u.q, u.k
    keys = []
    for coeff in enumerate_subspaces(q, k, dim):
        if q == 2:
            imgs = []
            for c in coeff.rows:
                x = 0
                for i in range(k):
                    if c >> i & 1:
                        x ^= u.rows[i]
                imgs.append(x)
            keys.append(rref_bits(imgs))
        else:
            rows = []
            for c in coeff.rows:
                acc = [0] * u.v
                for i in range(k):
                    if c[i]:
                        acc = [(a + c[i] * b) % q for a, b in zip(acc, u.rows[i])]
                rows.append(pack_row(q, acc))
            keys.append(Subspace.from_rows(q, u.v, rows).rows)
    return keys


def meet_graph(subspaces: Sequence[Subspace], max_meet: int, labels: Sequence[int] | None = None) -> ConflictGraph:
    """Edge between U and W iff dim(U cap W) <= max_meet."""
    n = len(subspaces)
    if n > GRAPH_CAP:
        raise CapExceeded(f"{n} vertices exceed the graph cap {GRAPH_CAP}")
    full = (1 << n) - 1
    if max_meet < 0:
        adj = [0] * n
    elif n <= 2500:
        masks = [s.span_mask for s in subspaces]
        q = subspaces[0].q if n else 2
        adj = [0] * n
        for i in range(n):
            mi = masks[i]
            row = 0
            for j in range(i):
                if popcount_dim(mi, masks[j], q) <= max_meet:
                    row |= 1 << j
                    adj[j] |= 1 << i
            adj[i] |= row
    else:
        # non-neighbours share a (max_meet+1)-subspace
        holders: dict = {}
        subkeys = []
        for i, s in enumerate(subspaces):
            keys = _sub_keys(s, max_meet + 1) if s.k > max_meet else []
            subkeys.append(keys)
            for key in keys:
                holders[key] = holders.get(key, 0) | (1 << i)
        adj = []
        for i, keys in enumerate(subkeys):
            blocked = 0
            for key in keys:
                blocked |= holders[key]
            adj.append(full & ~blocked & ~(1 << i))
    g = ConflictGraph(adj, labels if labels is not None else [s.index for s in subspaces])
    g.subspaces = list(subspaces)
    return g


def build_distance_graph(q: int, v: int, k: int, d: int) -> ConflictGraph:
    """All k-subspaces of F_q^v, adjacent iff their subspace distance is >= d."""
    n = gaussian_binomial(v, k, q)
    if n > GRAPH_CAP:
        raise CapExceeded(f"[{v} {k}]_{q} = {n} vertices exceed the graph cap {GRAPH_CAP}")
    verts = all_subspaces(q, v, k)
    # d_s = 2k - 2 dim(U cap W) >= d  <=>  dim(U cap W) <= k - ceil(d/2)
    max_meet = k - (d + 1) // 2
    return meet_graph(verts, max_meet)


def candidate_set(code: Iterable[Subspace], q: int, v: int, dim: int, max_meet: int) -> list[Subspace]:
    """All ``dim``-subspaces meeting every member of ``code`` in at most ``max_meet`` dimensions."""
    masks = [u.span_mask for u in code]
    out = []
    for w in enumerate_subspaces(q, v, dim):
        wm = w.span_mask
        if all(popcount_dim(wm, m, q) <= max_meet for m in masks):
            out.append(w)
    return out


def build_extension_graph(c: SubspaceCode, strict: bool = True) -> ConflictGraph:
    """Graph on A(C) = {solids W : d_s(W,U) >= 5 for all U in C}, edges iff d_s >= 6.

    A 16-clique together with C is a (7,33,5;{3,4})_2 code.
    """
    if strict:
        if (c.q, c.v) != (2, 7) or c.dimensions != frozenset([3]) or len(c) != 17 or c.min_distance != 6:
            raise GraphError(f"expected a (7,17,6;3)_2 code, got {c!r} with d={c.min_distance}")
    (k,) = c.dimensions
    solid = c.v - k
    # d_s(W,U) = k + solid - 2 dim(W cap U) >= 5
    verts = candidate_set(c, c.q, c.v, solid, (k + solid - 5) // 2)
    return meet_graph(verts, solid - 3)


# -------------------------------------------------------------------- search


@dataclass
class CliqueResult:
    clique: list[int]
    lower: int
    upper: int
    optimal: bool
    nodes: int
    elapsed: float
    status: str = "complete"  # complete | target | budget
    details: dict = field(default_factory=dict)

    def summary(self) -> str:
        flag = "optimal" if self.optimal else self.status
        return f"clique {self.lower} (upper bound {self.upper}, {flag}) nodes={self.nodes} time={self.elapsed:.2f}s"


def _root_setup(g: ConflictGraph):
    n = g.n
    base = g.packed()
    order = _kernels.degeneracy_order(base, n) if n else np.zeros(0, np.int64)
    adj = g.packed(order) if n else base
    W = adj.shape[1]
    D = n + 2
    state = {
        "Pst": np.zeros((D, W), np.uint64),
        "ordv": np.zeros((D, max(n, 1)), np.int64),
        "ordc": np.zeros((D, max(n, 1)), np.int64),
        "pos": np.zeros(D, np.int64),
        "clq": np.zeros(D, np.int64),
        "best": np.zeros(1, np.int64),
        "bestc": np.zeros(D, np.int64),
    }
    for j in range(n):
        state["Pst"][0, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    m = _kernels.color_sort(state["Pst"][0], adj, state["ordv"][0], state["ordc"][0]) if n else 0
    state["pos"][0] = m
    return order, adj, state


def _stack_bound(state, depth: int, floor: int) -> int:
    ub = floor
    pos, ordc = state["pos"], state["ordc"]
    for j in range(depth + 1):
        p = pos[j]
        if p > 0:
            ub = max(ub, j + int(ordc[j, p - 1]))
    return ub


def greedy_clique(g: ConflictGraph, restarts: int = 10, seed: int = 0, steps: int | None = None,
                  target: int | None = None) -> list[int]:
    """Best clique over ``restarts`` randomized plateau-search runs; deterministic per seed."""
    if g.n == 0:
        return []
    adj = g.packed()
    steps = 50 * g.n + 1000 if steps is None else steps
    tgt = g.n + 1 if target is None else target
    rng = np.random.default_rng(seed)
    best: list[int] = []
    start = np.zeros(g.n, np.bool_)
    for _ in range(max(1, restarts)):
        s = int(rng.integers(0, 2**31 - 1))
        found = _kernels.local_search(adj, g.n, steps, s, 7, tgt, start)
        clique = [int(v) for v in np.flatnonzero(found)]
        if len(clique) > len(best):
            best = clique
            if len(best) >= tgt:
                break
    if not g.is_clique(best):
        raise GraphError("heuristic returned a non-clique")
    return best


def max_clique(
    g: ConflictGraph,
    budget_seconds: float | None = None,
    budget_nodes: int | None = None,
    target: int | None = None,
    seed: int = 0,
    threads: int = 1,
    warm_restarts: int = 4,
) -> CliqueResult:
    """Branch and bound for a maximum clique with anytime upper bounds.

    With ``target`` the search stops at the first clique of that size; an
    exhausted search without reaching it proves the maximum is below target.
    On budget exhaustion the result carries the incumbent and a valid global
    upper bound.
    """
    t0 = time.monotonic()
    if g.n == 0:
        return CliqueResult([], 0, 0, True, 0, 0.0)
    tgt = g.n + 1 if target is None else target
    prune_at = 0 if target is None else target - 1
    warm = greedy_clique(g, restarts=warm_restarts, seed=seed, target=tgt) if warm_restarts > 0 else [0]
    if threads > 1:
        result = _parallel_search(g, warm, tgt, prune_at, budget_seconds, budget_nodes, threads, t0)
    else:
        result = _serial_search(g, warm, tgt, prune_at, budget_seconds, budget_nodes, t0)
    if not g.is_clique(result.clique):
        raise GraphError("internal error: result is not a clique")
    if result.lower != len(result.clique) or result.lower > result.upper:
        raise GraphError("internal error: inconsistent bounds")
    result.elapsed = time.monotonic() - t0
    return result


def _serial_search(g, warm, tgt, prune_at, budget_seconds, budget_nodes, t0) -> CliqueResult:
    order, adj, st = _root_setup(g)
    root_bound = int(st["ordc"][0, st["pos"][0] - 1])
    st["best"][0] = len(warm)
    best_clique = list(warm)
    if len(warm) >= tgt:
        upper = root_bound if len(warm) < root_bound else len(warm)
        return CliqueResult(best_clique, len(warm), upper, upper == len(warm), 0, 0.0, "target",
                            {"root_bound": root_bound})
    depth, nodes, status = 0, 0, 0
    while True:
        chunk = CHUNK_NODES
        if budget_nodes is not None:
            chunk = min(chunk, budget_nodes - nodes)
            if chunk <= 0:
                break
        depth, done, status = _kernels.bnb_search(
            adj, st["Pst"], st["ordv"], st["ordc"], st["pos"], st["clq"], depth,
            st["best"], st["bestc"], prune_at, tgt, chunk,
        )
        nodes += done
        if st["best"][0] > len(best_clique):
            best_clique = [int(order[v]) for v in st["bestc"][: st["best"][0]]]
        if status != 0:
            break
        if budget_seconds is not None and time.monotonic() - t0 >= budget_seconds:
            break
    lower = len(best_clique)
    floor = max(lower, min(prune_at, root_bound))
    if status == 2:
        upper = floor
    elif status == 1:
        upper = max(lower, _stack_bound(st, depth, floor))
    else:
        upper = _stack_bound(st, depth, floor)
    upper = min(upper, root_bound) if root_bound >= lower else lower
    state = {2: "complete", 1: "target", 0: "budget"}[status]
    return CliqueResult(best_clique, lower, upper, lower == upper, nodes, 0.0, state, {"root_bound": root_bound})


# ----------------------------------------------------------------- parallel

_W: dict = {}


def _init_worker(adj, order_colors, best_value):
    _W["adj"] = adj
    _W["root_v"], _W["root_c"] = order_colors
    _W["best"] = best_value


def _run_branches(indices, tgt, prune_at, deadline, node_budget):
    adj = _W["adj"]
    root_v, root_c = _W["root_v"], _W["root_c"]
    shared = _W["best"]
    n, W = adj.shape
    D = n + 2
    Pst = np.zeros((D, W), np.uint64)
    ordv = np.zeros((D, max(n, 1)), np.int64)
    ordc = np.zeros((D, max(n, 1)), np.int64)
    pos = np.zeros(D, np.int64)
    clq = np.zeros(D, np.int64)
    bestc = np.zeros(D, np.int64)
    best = np.zeros(1, np.int64)
    best_clique: list[int] = []
    unfinished: list[int] = []
    nodes = 0
    hit = False
    for idx_pos, i in enumerate(indices):
        with shared.get_lock():
            best[0] = max(best[0], shared.value)
        if int(root_c[i]) <= max(best[0], prune_at) or hit:
            if hit:
                unfinished.extend(indices[idx_pos:])
                break
            continue
        if (deadline is not None and time.monotonic() >= deadline) or (node_budget is not None and nodes >= node_budget):
            unfinished.extend(indices[idx_pos:])
            break
        v = int(root_v[i])
        # level 0 holds only the chosen root vertex; level 1 its candidates
        Pst[:] = 0
        for j in range(i):
            u = int(root_v[j])
            Pst[0, u >> 6] |= np.uint64(1) << np.uint64(u & 63)
        Pst[0, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
        ordv[0, 0] = v
        ordc[0, 0] = int(root_c[i])
        pos[0] = 1
        depth, status = 0, 0
        while True:
            chunk = CHUNK_NODES if node_budget is None else max(1, min(CHUNK_NODES, node_budget - nodes))
            before = int(best[0])
            depth, done, status = _kernels.bnb_search(adj, Pst, ordv, ordc, pos, clq, depth, best, bestc, prune_at, tgt, chunk)
            nodes += done
            if best[0] > before:
                best_clique = [int(x) for x in bestc[: best[0]]]
                with shared.get_lock():
                    if best[0] > shared.value:
                        shared.value = int(best[0])
            with shared.get_lock():
                best[0] = max(best[0], shared.value)
            if status != 0:
                break
            if (deadline is not None and time.monotonic() >= deadline) or (node_budget is not None and nodes >= node_budget):
                break
        if status == 1:
            hit = True
        elif status == 0:
            unfinished.append(i)
            unfinished.extend(indices[idx_pos + 1 :])
            break
    return best_clique, unfinished, nodes, hit


def _parallel_search(g, warm, tgt, prune_at, budget_seconds, budget_nodes, threads, t0) -> CliqueResult:
    order, adj, st = _root_setup(g)
    m = int(st["pos"][0])
    root_v = st["ordv"][0, :m].copy()
    root_c = st["ordc"][0, :m].copy()
    root_bound = int(root_c[m - 1])
    best_clique = list(warm)
    if len(warm) >= tgt:
        return CliqueResult(best_clique, len(warm), max(len(warm), root_bound), len(warm) >= root_bound, 0, 0.0,
                            "target", {"root_bound": root_bound})
    shared = mp.Value("q", len(warm))
    # branches processed from the highest color down, dealt round-robin
    branches = list(range(m - 1, -1, -1))
    parts = [branches[w::threads] for w in range(threads)]
    deadline = None if budget_seconds is None else t0 + budget_seconds
    per_worker = None if budget_nodes is None else max(1, budget_nodes // threads)
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    with ProcessPoolExecutor(threads, mp_context=ctx, initializer=_init_worker,
                             initargs=(adj, (root_v, root_c), shared)) as ex:
        futures = [ex.submit(_run_branches, p, tgt, prune_at, deadline, per_worker) for p in parts]
        outs = [f.result() for f in futures]
    nodes = sum(o[2] for o in outs)

    for clique, _, _, _ in outs:
        if len(clique) > len(best_clique):
            best_clique = [int(order[v]) for v in clique]
    lower = len(best_clique)
    unfinished = sorted({i for o in outs for i in o[1]})
    floor = max(lower, min(prune_at, root_bound))
    upper = max([floor] + [int(root_c[i]) for i in unfinished])
    upper = max(lower, min(upper, root_bound))
    status = "target" if lower >= tgt else ("budget" if unfinished else "complete")
    return CliqueResult(best_clique, lower, upper, lower == upper, nodes, 0.0, status,
                        {"root_bound": root_bound, "threads": threads})
