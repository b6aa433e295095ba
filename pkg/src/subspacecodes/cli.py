"""Command-line interface: ``subspacecodes <subcommand> ...``.

Exit status: 0 success, 1 a check failed (claim mismatch, infeasible
solution, clique target missed), 2 usage or input error.

Environment overrides: ``SUBSPACECODES_BUDGET_SECONDS`` and
``SUBSPACECODES_THREADS`` supply defaults for ``--budget-seconds`` and
``--threads``.
"""

from __future__ import annotations

import argparse
import os
import shlex
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import bounds, clique_engine, codes, constructions, grassmann, ilp_models
from .errors import SubspaceCodesError

ENV_BUDGET = "SUBSPACECODES_BUDGET_SECONDS"
ENV_THREADS = "SUBSPACECODES_THREADS"

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: tuple[int, ...] = ()
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    budget_seconds: float | None = None
    budget_nodes: int | None = None
    seed: int = 0
    threads: int = 1
    solver_cmd: str | None = None
    options: dict = field(default_factory=dict)


# ------------------------------------------------------------------ output


def write_atomic(path: str | None, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename; ``None`` or '-' means stdout."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    write_atomic_with(path, lambda fh: fh.write(text))


def write_atomic_with(path: str, writer: Callable) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            writer(fh)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_db(path: str | None) -> bounds.BoundsDb | None:
    return None if path is None else bounds.BoundsDb.loads(_read(path))


def _log(msg: str) -> None:
    print(f"# {time.strftime('%H:%M:%S')} {msg}", file=sys.stderr)


# ---------------------------------------------------------------- commands


def cmd_enumerate(cfg: RunConfig) -> int:
    q, v, k = cfg.params
    n = grassmann.gaussian_binomial(v, k, q)
    lines = [f"[{v} {k}]_{q} = {n}"]
    if cfg.options.get("list"):
        limit = cfg.options.get("limit")
        for i, u in enumerate(grassmann.enumerate_subspaces(q, v, k)):
            if limit is not None and i >= limit:
                break
            lines.append(f"{i} {','.join(u.row_strings()) or '0' * v}")
    write_atomic(cfg.output, "\n".join(lines) + "\n")
    return EXIT_OK


def _load_code(path: str) -> tuple[codes.SubspaceCode, codes.CodeParams | None]:
    return codes.parse_code_with_claim(_read(path))


def cmd_verify(cfg: RunConfig) -> int:
    c, claim = _load_code(cfg.inputs[0])
    report = codes.verify(c, claim)
    lines = report.lines() + [f"dimension_distribution {codes.dimension_distribution(c)}"]
    write_atomic(cfg.output, "\n".join(lines) + "\n")
    return EXIT_OK if report.ok else EXIT_CHECK


def cmd_bound(cfg: RunConfig) -> int:
    q, v, d, k = cfg.params
    db = _load_db(cfg.options.get("db"))
    out = []
    best = bounds.upper_bound(q, v, d, k, db)
    out.append(f"upper bound A_{q}({v},{d};{k}) <= {best.value}")
    out.append(best.render())
    if d % 2 == 0 and 2 <= d <= 2 * k and k >= 1:
        jb = bounds.johnson_bound(q, v, d, k, db)
        out.append(f"johnson: {jb.value}")
        out.append(jb.render())
    if v == 2 * k and d == 2 * k - 2 and k >= 2:
        c = cfg.options.get("c", 1)
        val = bounds.one_incidence_bound(q, k, c)
        out.append(f"one-incidence (c={c}): {val}")
        out.append(f"  (q^k+1)(q^k+1-c) = ({q ** k}+1)({q ** k}+1-{c}) = {val}")
    write_atomic(cfg.output, "\n".join(out) + "\n")
    return EXIT_OK


CONSTRUCTIONS = ("lifted-mrd", "lifted-mrd-plus-one")


def cmd_construct(cfg: RunConfig) -> int:
    kind = cfg.options["kind"]
    q, v, k = cfg.params
    if q != 2:
        raise UsageError("constructions are implemented over F_2 only (q=2)")
    d = cfg.options.get("d") or 6
    if kind == "lifted-mrd":
        c = constructions.lifted_mrd(v, k, d)
    else:
        c = constructions.lifted_mrd_plus_one(v, k, d)
    claim = codes.CodeParams(v=v, N=len(c), d=c.min_distance, K=c.dimensions, q=2)
    write_atomic(cfg.output, codes.emit_code(c, claim))
    return EXIT_OK


def _subspace_arg(q: int, v: int, text: str) -> grassmann.Subspace:
    rows = [[int(ch) for ch in r.strip()] for r in text.split(",") if r.strip()]
    if any(len(r) != v for r in rows):
        raise UsageError(f"rows of {text!r} must have length {v}")
    return grassmann.Subspace.from_lists(q, rows, v)


def cmd_shorten(cfg: RunConfig) -> int:
    c, _ = _load_code(cfg.inputs[0])
    p = _subspace_arg(c.q, c.v, cfg.options["point"])
    h = _subspace_arg(c.q, c.v, cfg.options["hyperplane"])
    s = codes.shorten(c, p, h)
    claim = codes.CodeParams(v=s.v, N=len(s), d=s.min_distance, K=s.dimensions, q=s.q)
    write_atomic(cfg.output, codes.emit_code(s, claim))
    return EXIT_OK


def cmd_dualize(cfg: RunConfig) -> int:
    c, _ = _load_code(cfg.inputs[0])
    o = codes.orthogonal_code(c)
    claim = codes.CodeParams(v=o.v, N=len(o), d=o.min_distance, K=o.dimensions, q=o.q)
    write_atomic(cfg.output, codes.emit_code(o, claim))
    return EXIT_OK


def _emit_model(cfg: RunConfig, model: ilp_models.IlpModel) -> int:
    relaxed = cfg.options.get("relax", False)
    emit = ilp_models.relax_note if relaxed else ilp_models.export_model
    _log(f"model: {model.stats}")
    if cfg.output is None or cfg.output == "-":
        if cfg.solver_cmd:
            raise UsageError("--solver-cmd needs -o/--output for the model file")
        emit(model, sys.stdout)
        return EXIT_OK
    write_atomic_with(cfg.output, lambda fh: emit(model, fh))
    if cfg.solver_cmd:
        return run_solver(cfg.solver_cmd, cfg.output, model)
    return EXIT_OK


def run_solver(template: str, model_path: str, model: ilp_models.IlpModel) -> int:
    """Run an external solver and recheck its solution exactly."""
    if "{model}" not in template or "{solution}" not in template:
        raise UsageError("--solver-cmd must contain {model} and {solution} placeholders")
    sol_path = model_path + ".sol"
    argv = [a.format(model=model_path, solution=sol_path) for a in shlex.split(template)]
    _log(f"running {' '.join(argv)}")
    proc = subprocess.run(argv, capture_output=True, text=True)
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise UsageError(f"solver exited with status {proc.returncode}")
    assignment = ilp_models.import_solution(model, _read(sol_path))
    report = ilp_models.check_solution(model, assignment)
    print("\n".join(report.lines()))
    return EXIT_OK if report.feasible else EXIT_CHECK


def cmd_build_ilp(cfg: RunConfig) -> int:
    q, v, d, k = cfg.params
    db = _load_db(cfg.options.get("db"))
    model = ilp_models.build_full_model(q, v, d, k, db, full_constraints=cfg.options.get("full_constraints", False))
    if cfg.options.get("prescribe"):
        pc, _ = _load_code(cfg.options["prescribe"])
        model = ilp_models.prescribe(model, pc)
    return _emit_model(cfg, model)


def cmd_build_ext(cfg: RunConfig) -> int:
    f, _ = _load_code(cfg.inputs[0])
    model, cands, graph = ilp_models.build_extension_model(f, strict=not cfg.options.get("loose", False))
    _log(f"|A(F)| = {len(cands)}, graph edges {graph.edge_count()}")
    if cfg.options.get("graph_out"):
        write_atomic(cfg.options["graph_out"], graph.to_dimacs())
    status = _emit_model(cfg, model)
    if cfg.options.get("solve"):
        res = clique_engine.max_clique(graph, budget_seconds=cfg.budget_seconds, budget_nodes=cfg.budget_nodes,
                                       seed=cfg.seed, threads=cfg.threads)
        print(f"z(F): {res.summary()}")
        print(f"N <= z(F) + #F <= {res.upper + len(f)}")
    return status


def cmd_build_blowup(cfg: RunConfig) -> int:
    f3, _ = _load_code(cfg.inputs[0])
    f4, _ = _load_code(cfg.inputs[1])
    model = ilp_models.build_blowup_model(f3, f4)
    return _emit_model(cfg, model)


def cmd_check_sol(cfg: RunConfig) -> int:
    model = ilp_models.parse_lp(_read(cfg.inputs[0]))
    assignment = ilp_models.import_solution(model, _read(cfg.inputs[1]))
    report = ilp_models.check_solution(model, assignment)
    write_atomic(cfg.output, "\n".join(report.lines()) + "\n")
    return EXIT_OK if report.feasible else EXIT_CHECK


def cmd_clique(cfg: RunConfig) -> int:
    opts = cfg.options
    sources = [bool(opts.get("graph")), bool(opts.get("code")), bool(opts.get("distance"))]
    if sum(sources) != 1:
        raise UsageError("clique needs exactly one of --graph, --code, --distance")
    base = None
    if opts.get("graph"):
        g = clique_engine.ConflictGraph.from_dimacs(_read(opts["graph"]))
    elif opts.get("code"):
        base, _ = _load_code(opts["code"])
        g = clique_engine.build_extension_graph(base)
    else:
        q, v, k, d = opts["distance"]
        g = clique_engine.build_distance_graph(q, v, k, d)
    _log(f"graph: {g.n} vertices, {g.edge_count()} edges")
    if opts.get("graph_out"):
        write_atomic(opts["graph_out"], g.to_dimacs())
    res = clique_engine.max_clique(g, budget_seconds=cfg.budget_seconds, budget_nodes=cfg.budget_nodes,
                                   target=opts.get("target"), seed=cfg.seed, threads=cfg.threads)
    lines = [res.summary(), "clique " + " ".join(str(g.labels[i]) for i in res.clique)]
    if base is not None and g.subspaces is not None:
        ext = base.union(g.subspaces[i] for i in res.clique)
        report = codes.verify(ext)
        lines.append(f"extended code {report.params()} distribution {codes.dimension_distribution(ext)}")
        if opts.get("code_out"):
            claim = codes.CodeParams(v=ext.v, N=len(ext), d=ext.min_distance, K=ext.dimensions, q=ext.q)
            write_atomic(opts["code_out"], codes.emit_code(ext, claim))
    write_atomic(cfg.output, "\n".join(lines) + "\n")
    target = opts.get("target")
    return EXIT_CHECK if target is not None and res.lower < target else EXIT_OK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
    "bound": cmd_bound,
    "construct": cmd_construct,
    "shorten": cmd_shorten,
    "dualize": cmd_dualize,
    "build-ilp": cmd_build_ilp,
    "build-ext": cmd_build_ext,
    "build-blowup": cmd_build_blowup,
    "check-sol": cmd_check_sol,
    "clique": cmd_clique,
}


# ------------------------------------------------------------------ parser


def _env_default(name: str, conv: Callable):
    raw = os.environ.get(name)
    if raw is None:
        return None
    try:
        return conv(raw)
    except ValueError:
        raise UsageError(f"environment variable {name}={raw!r} is not valid") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subspacecodes", description="Constant-dimension subspace code toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def out(sp):
        sp.add_argument("-o", "--output", help="output file (default stdout)")

    def search(sp):
        sp.add_argument("--budget-seconds", type=float)
        sp.add_argument("--budget-nodes", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int)

    sp = sub.add_parser("enumerate", help="count or list the k-subspaces of F_q^v")
    sp.add_argument("q", type=int), sp.add_argument("v", type=int), sp.add_argument("k", type=int)
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--limit", type=int)
    out(sp)

    sp = sub.add_parser("verify", help="verify a code file against its header claim")
    sp.add_argument("code")
    out(sp)

    sp = sub.add_parser("bound", help="upper bounds on A_q(v,d;k) with derivations")
    for name in ("q", "v", "d", "k"):
        sp.add_argument(name, type=int)
    sp.add_argument("--db", help="bounds table file (default: bundled table)")
    sp.add_argument("--c", type=int, default=1, help="c for the one-incidence bound")
    out(sp)

    sp = sub.add_parser("construct", help="lifted Gabidulin codes, optionally plus one")
    sp.add_argument("kind", choices=CONSTRUCTIONS)
    sp.add_argument("q", type=int), sp.add_argument("v", type=int), sp.add_argument("k", type=int)
    sp.add_argument("--d", type=int, help="subspace distance (default 6)")
    out(sp)

    sp = sub.add_parser("shorten", help="shorten a code by a point and a hyperplane")
    sp.add_argument("code")
    sp.add_argument("--point", required=True, help="row, e.g. 1000000")
    sp.add_argument("--hyperplane", required=True, help="comma-separated basis rows")
    out(sp)

    sp = sub.add_parser("dualize", help="orthogonal code")
    sp.add_argument("code")
    out(sp)

    sp = sub.add_parser("build-ilp", help="incidence BLP for A_q(v,d;k)")
    for name in ("q", "v", "d", "k"):
        sp.add_argument(name, type=int)
    sp.add_argument("--db")
    sp.add_argument("--full-constraints", action="store_true", help="also emit the redundant middle dimensions")
    sp.add_argument("--prescribe", help="code file whose codewords are fixed to 1")
    sp.add_argument("--relax", action="store_true", help="emit the LP relaxation")
    sp.add_argument("--solver-cmd", help="external solver, with {model} and {solution} placeholders")
    out(sp)

    sp = sub.add_parser("build-ext", help="plane-packing model over A(F) for a set F of solids in F_2^7")
    sp.add_argument("code")
    sp.add_argument("--loose", action="store_true", help="accept F without the d >= 6 check")
    sp.add_argument("--graph-out", help="write the compatibility graph (DIMACS)")
    sp.add_argument("--solve", action="store_true", help="solve z(F) with the clique engine")
    sp.add_argument("--relax", action="store_true")
    sp.add_argument("--solver-cmd")
    search(sp)
    out(sp)

    sp = sub.add_parser("build-blowup", help="blow-up model from a (7,17,6;3)_2 and a (7,16,6;4)_2 code")
    sp.add_argument("f3"), sp.add_argument("f4")
    sp.add_argument("--relax", action="store_true")
    sp.add_argument("--solver-cmd")
    out(sp)

    sp = sub.add_parser("check-sol", help="exactly check a solution file against a model file")
    sp.add_argument("model"), sp.add_argument("solution")
    out(sp)

    sp = sub.add_parser("clique", help="maximum clique with anytime bounds")
    sp.add_argument("--graph", help="DIMACS graph file")
    sp.add_argument("--code", help="(7,17,6;3)_2 code file: search its extension graph")
    sp.add_argument("--distance", type=int, nargs=4, metavar=("Q", "V", "K", "D"))
    sp.add_argument("--target", type=int)
    sp.add_argument("--graph-out")
    sp.add_argument("--code-out", help="write the extended code (with --code)")
    search(sp)
    out(sp)
    return p


def make_config(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns).copy()
    cmd = d.pop("command")
    cfg = RunConfig(cmd)
    cfg.output = d.pop("output", None)
    names = {"enumerate": ("q", "v", "k"), "bound": ("q", "v", "d", "k"), "build-ilp": ("q", "v", "d", "k"),
             "construct": ("q", "v", "k")}.get(cmd, ())
    cfg.params = tuple(d.pop(n) for n in names)
    for n in ("code", "model", "solution", "f3", "f4"):
        if n in d and not (cmd == "clique" and n == "code"):
            cfg.inputs.append(d.pop(n))
    budget = d.pop("budget_seconds", None)
    cfg.budget_seconds = budget if budget is not None else _env_default(ENV_BUDGET, float)
    cfg.budget_nodes = d.pop("budget_nodes", None)
    cfg.seed = d.pop("seed", 0)
    threads = d.pop("threads", None)
    threads = threads if threads is not None else _env_default(ENV_THREADS, int)
    cfg.threads = 1 if threads is None else threads
    cfg.solver_cmd = d.pop("solver_cmd", None)
    cfg.options = d
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.threads < 1:
        raise UsageError("--threads must be at least 1")
    if cfg.budget_seconds is not None and cfg.budget_seconds <= 0:
        raise UsageError("--budget-seconds must be positive")
    if cfg.budget_nodes is not None and cfg.budget_nodes <= 0:
        raise UsageError("--budget-nodes must be positive")
    if cfg.params and any(x < 0 for x in cfg.params):
        raise UsageError("parameters must be non-negative")
    if cfg.params and cfg.params[0] not in (2, 3, 5, 7):
        raise UsageError(f"q={cfg.params[0]} is not a supported prime (2, 3, 5, 7)")
    if cfg.command == "enumerate" and cfg.options.get("limit") is not None and cfg.options["limit"] < 0:
        raise UsageError("--limit must be non-negative")
    t = cfg.options.get("target")
    if t is not None and t < 1:
        raise UsageError("--target must be positive")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = make_config(ns)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"subspacecodes {ns.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SubspaceCodesError as exc:
        print(f"subspacecodes {ns.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
