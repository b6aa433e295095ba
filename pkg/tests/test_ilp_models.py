import io
import random
from fractions import Fraction

import numpy as np
import pytest

from oracles import span
from subspacecodes.clique_engine import build_extension_graph, max_clique
from subspacecodes.codes import SubspaceCode, orthogonal_code
from subspacecodes.constructions import lifted_mrd_plus_one
from subspacecodes.errors import ModelError, PrescriptionConflict, SolutionError
from subspacecodes.grassmann import Subspace, enumerate_subspaces, gaussian_binomial, intersect_dim, subspace_at
from subspacecodes.ilp_models import (
    build_blowup_model,
    build_extension_model,
    build_full_model,
    check_solution,
    export_digest,
    export_model,
    full_model_dimensions,
    import_solution,
    incidence_assignment,
    packing_graph,
    parse_lp,
    prescribe,
    relax_note,
    solution_text,
    solve_set_packing,
)


def row_sets(model):
    return {c.name: set(c.indices.tolist()) for c in model.constraints()}


@pytest.fixture(scope="module")
def c7():
    return lifted_mrd_plus_one(7, 3)


@pytest.fixture(scope="module")
def f16(c7):
    g = build_extension_graph(c7)
    r = max_clique(g, target=16, budget_seconds=600)
    assert r.lower >= 16
    return SubspaceCode(2, 7, [g.subspaces[i] for i in r.clique[:16]])


def test_small_model_families_and_optimum():
    m = build_full_model(2, 4, 4, 2)
    assert m.num_vars == 35 and len(m.con_names) == 30
    assert {n.split("_")[0] for n in m.con_names} == {"c1", "c3"}
    assert all(c.rhs == 1 and len(c.indices) == 7 for c in m.constraints())
    res, assignment = solve_set_packing(m)
    assert res.optimal and res.lower == 5
    rep = check_solution(m, assignment)
    assert rep.feasible and rep.objective == 5


def test_dimension_schedule():
    assert full_model_dimensions(8, 6, 4) == [(1, "contain"), (2, "one"), (6, "one"), (7, "inside")]
    assert full_model_dimensions(8, 6, 4, full_constraints=True) == [
        (1, "contain"), (2, "one"), (3, "one"), (5, "one"), (6, "one"), (7, "inside")]
    # constraint count of the headline model from Gaussian binomials
    assert sum(gaussian_binomial(8, a, 2) for a, _ in full_model_dimensions(8, 6, 4)) == 22100


@pytest.mark.parametrize("q,v,d,k", [(2, 5, 4, 2), (2, 6, 4, 3), (3, 4, 2, 2)])
def test_rows_match_naive_incidences(q, v, d, k):
    m = build_full_model(q, v, d, k)
    ks = list(enumerate_subspaces(q, v, k))
    spans = [span(q, u.basis.to_lists()) for u in ks]
    rows = row_sets(m)
    expected = sum(gaussian_binomial(v, a, q) for a, _ in full_model_dimensions(v, d, k))
    assert len(rows) == expected
    rng = random.Random(v * 10 + k)
    for name in rng.sample(sorted(rows), 25):
        a, idx = (int(t) for t in name[1:].split("_"))
        x = subspace_at(q, v, a, idx)
        sx = span(q, x.basis.to_lists())
        want = {i for i, su in enumerate(spans) if su <= sx or sx <= su}
        assert rows[name] == want


def test_generic_incidence_path_agrees():
    a, b = build_full_model(2, 6, 4, 3), build_full_model(2, 6, 4, 3, generic=True)
    assert a.con_names == b.con_names
    assert np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)


def test_model_domain():
    with pytest.raises(ModelError):
        build_full_model(2, 8, 5, 4)
    with pytest.raises(ModelError):
        build_full_model(2, 6, 8, 4)


def test_prescribe():
    m = build_full_model(2, 6, 4, 3)
    assert prescribe(m, []) is m
    planes = list(enumerate_subspaces(2, 6, 3))
    a = Subspace.standard(2, 6, [0, 1, 2])
    b = Subspace.standard(2, 6, [3, 4, 5])
    p = prescribe(m, [a, b])
    assert p.fixings == {a.index: 1, b.index: 1}
    near = next(u for u in planes if intersect_dim(u, a) == 2)
    with pytest.raises(PrescriptionConflict):
        prescribe(m, [a, near])
    with pytest.raises(ModelError):
        prescribe(m, [Subspace.standard(2, 6, [0, 1])])


def test_prescribe_seventeen_planes_on_full_model(c7):
    m = build_full_model(2, 7, 6, 3)
    p = prescribe(m, list(c7))
    assert len(p.fixings) == 17
    rep = check_solution(p, incidence_assignment(p, c7))
    assert rep.feasible and rep.objective == 17


def test_extension_model_empty_and_single_solid():
    m, cands, g = build_extension_model(SubspaceCode(2, 7))
    assert m.num_vars == len(cands) == 11811 == g.n
    s = Subspace.standard(2, 7, [0, 1, 2, 3])
    m1, cands1, _ = build_extension_model(SubspaceCode(2, 7, [s]))
    naive = [u for u in enumerate_subspaces(2, 7, 3) if intersect_dim(u, s) <= 1]
    assert cands1 == naive
    assert all(c.rhs == 1 for c in m1.constraints())


def test_extension_model_for_dual_code(c7):
    m, cands, g = build_extension_model(orthogonal_code(c7))
    assert 832 <= m.num_vars <= 1056
    assert packing_graph(m).adj == g.adj
    with pytest.raises(ModelError):
        build_extension_model(c7)


def test_blowup_model(c7, f16):
    m = build_blowup_model(c7, f16)
    ys = [i for i, n in enumerate(m.var_names) if n.startswith("y_")]
    assert len(ys) == 128 and m.meta["points"] == 128
    assert len(m.fixings) == 16 and set(m.fixings.values()) == {1}
    links = [c for c in m.constraints() if c.name.startswith("link_")]
    assert len(links) == 128
    for c in links:
        assert c.sense == "=" and c.rhs == 0
        assert sorted(c.coefs.tolist()) == [-1] + [1] * 17
        assert m.var_names[int(c.indices[c.coefs == -1][0])].startswith("y_")
    ysum = m.constraint(m.con_names.index("ysum"))
    assert ysum.sense == "=" and ysum.rhs == 1 and len(ysum.indices) == 128
    with pytest.raises(ModelError):
        build_blowup_model(f16, c7)


def test_export_round_trip_and_stability():
    m = prescribe(build_full_model(2, 5, 4, 2), [Subspace.standard(2, 5, [0, 1])])
    text = export_model(m)
    assert text == export_model(m)
    assert export_digest(m)[0] == export_digest(m)[0]
    buf = io.StringIO()
    export_model(m, buf)
    assert buf.getvalue() == text
    back = parse_lp(text)
    assert back.var_names == m.var_names and back.con_names == m.con_names
    assert np.array_equal(back.indptr, m.indptr) and np.array_equal(back.indices, m.indices)
    assert np.array_equal(back.rhs, m.rhs) and back.fixings == m.fixings
    assert export_model(back).split("Maximize", 1)[1] == text.split("Maximize", 1)[1]


def test_relaxation_differs_only_in_variable_sections():
    m = build_full_model(2, 4, 4, 2)
    text, rel = export_model(m), relax_note(m)
    assert text.split("Bounds")[0].split("Binary")[0] == rel.split("Bounds")[0]
    assert "Binary" not in rel and " 0 <= x_0 <= 1" in rel


def test_check_solution_reports():
    m = build_full_model(2, 4, 4, 2)
    assert check_solution(m, {}).feasible and check_solution(m, {}).objective == 0
    # two lines through the first point
    lines = list(enumerate_subspaces(2, 4, 2))
    p0 = Subspace.standard(2, 4, [0])
    through = [u for u in lines if intersect_dim(u, p0) == 1][:2]
    rep = check_solution(m, incidence_assignment(m, through))
    assert not rep.feasible and any(v.startswith(f"c1_{p0.index}:") for v in rep.violations)
    half = {j: Fraction(1, 7) for j in range(35)}
    frac = check_solution(m, half)
    assert frac.fractional and frac.feasible and frac.objective == 5
    assert "LP-relaxation" in frac.lines()[0]


def test_five_disjoint_lines_score_five():
    m = build_full_model(2, 4, 4, 2)
    lines = list(enumerate_subspaces(2, 4, 2))
    chosen = []
    for u in lines:
        if all(intersect_dim(u, w) == 0 for w in chosen):
            chosen.append(u)
    assert len(chosen) == 5
    text = solution_text(m, incidence_assignment(m, chosen))
    rep = check_solution(m, import_solution(m, text))
    assert rep.feasible and rep.objective == 5 and not rep.fractional


def test_import_solution_errors():
    m = build_full_model(2, 4, 4, 2)
    with pytest.raises(SolutionError):
        import_solution(m, "x_999 1\n")
    with pytest.raises(SolutionError):
        import_solution(m, "x_0 2\n")
    with pytest.raises(SolutionError):
        import_solution(m, "x_0\n")
    assert import_solution(m, "# c\nx_3 0.5\nx_4 1/3\n") == {3: Fraction(1, 2), 4: Fraction(1, 3)}


def test_parse_rejects_garbage():
    with pytest.raises(ModelError):
        parse_lp("Maximize\n obj: x\nSubject To\n c: x + y\nEnd\n")
    with pytest.raises(ModelError):
        parse_lp("Maximize\n obj: x\n")


def test_packing_route_rejects_general_models(c7):
    m = build_full_model(2, 7, 6, 3)
    with pytest.raises(ModelError):
        packing_graph(prescribe(m, list(c7)[:1]))
