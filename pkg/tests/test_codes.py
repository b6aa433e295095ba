import itertools
import random

import pytest

from oracles import naive_rank, span
from subspacecodes.bounds import degree_bound
from subspacecodes.codes import (
    CodeParams,
    SubspaceCode,
    dimension_distribution,
    emit_code,
    incidence_profile,
    incidence_set,
    orthogonal_code,
    parse_code,
    parse_code_with_claim,
    shorten,
    verify,
)
from subspacecodes.constructions import lifted_mrd_plus_one
from subspacecodes.errors import AmbientMismatch, CodeError, CodeFormatError, DuplicateCodewordError
from subspacecodes.grassmann import Subspace, enumerate_subspaces, gaussian_binomial, subspace_at


def naive_min_distance(c):
    best = None
    for u, w in itertools.combinations(c.codewords, 2):
        a, b = u.basis.to_lists(), w.basis.to_lists()
        join = naive_rank(c.q, a + b)
        d = 2 * join - len(a) - len(b)
        best = d if best is None else min(best, d)
    return best


def random_code(rng, q, v, size, dims=None):
    words = set()
    while len(words) < size:
        k = rng.choice(dims) if dims else rng.randrange(1, v)
        words.add(subspace_at(q, v, k, rng.randrange(gaussian_binomial(v, k, q))))
    return SubspaceCode(q, v, words)


@pytest.fixture(scope="module")
def c7():
    return lifted_mrd_plus_one(7, 3)


@pytest.fixture(scope="module")
def c8():
    return lifted_mrd_plus_one(8, 4)


def test_verify_constructed_code(c7):
    rep = verify(c7, CodeParams(v=7, N=17, d=6, K=frozenset([3]), q=2))
    assert rep.ok and rep.params() == "(7,17,6;3)_2" and rep.constant_dimension


def test_single_codeword_has_no_distance():
    c = SubspaceCode(2, 4, [Subspace.standard(2, 4, [0])])
    rep = verify(c)
    assert rep.N == 1 and rep.d is None and c.min_distance is None
    assert "undefined" in "\n".join(rep.lines())


def test_min_distance_random_lines_against_naive():
    lines = list(enumerate_subspaces(2, 4, 2))
    rng = random.Random(4)
    for _ in range(30):
        c = SubspaceCode(2, 4, rng.sample(lines, 10))
        assert c.min_distance == naive_min_distance(c)


def test_claim_mismatch_reported(c7):
    rep = verify(c7, CodeParams(v=7, N=17, d=8, K=frozenset([3]), q=2))
    assert not rep.ok and rep.mismatches == {"d": (8, 6)}
    assert any("attained by" in line for line in rep.lines())


def test_code_rejects_mixed_ambient_and_duplicates():
    with pytest.raises(AmbientMismatch):
        SubspaceCode(2, 4, [Subspace.standard(2, 5, [0])])
    p = Subspace.standard(2, 4, [0])
    with pytest.raises(CodeError):
        SubspaceCode(2, 4, [p, p])


def test_dimension_distribution_rendering(c8):
    assert str(dimension_distribution(SubspaceCode(2, 3))) == ""
    mixed = SubspaceCode(2, 7, list(lifted_mrd_plus_one(7, 3)) + list(orthogonal_code(lifted_mrd_plus_one(7, 3))))
    assert str(dimension_distribution(mixed)) == "3^17 4^17"
    assert str(dimension_distribution(SubspaceCode(2, 8, list(c8)[:17]))) == "4^17"


def test_orthogonal_code(c7):
    o = orthogonal_code(c7)
    assert verify(o).params() == "(7,17,6;4)_2"
    assert orthogonal_code(o) == c7
    rng = random.Random(8)
    for _ in range(10):
        c = random_code(rng, 2, 6, 20)
        oc = orthogonal_code(c)
        assert orthogonal_code(oc) == c
        assert oc.min_distance == naive_min_distance(c)
        assert sorted(u.k for u in oc) == sorted(6 - u.k for u in c)


def test_incidence_set_trivial_cases(c7):
    assert incidence_set(c7, Subspace.full(2, 7)) == list(c7.codewords)
    assert incidence_set(c7, Subspace.zero(2, 7)) == list(c7.codewords)
    with pytest.raises(AmbientMismatch):
        incidence_set(c7, Subspace.zero(2, 6))


def test_point_incidences_of_257_code_respect_bound(c8):
    top, hist = incidence_profile(c8, 1)
    assert top <= 17 == degree_bound(2, 8, 6, 4, 1)
    assert sum(hist.values()) == 255
    assert sum(n * m for n, m in hist.items()) == 257 * 15


def test_incidence_profile_rules(c7, c8):
    assert incidence_profile(c7, 0)[0] == 17
    assert incidence_profile(c7, 3)[0] == 1
    top7, hist7 = incidence_profile(c8, 7)
    assert top7 <= 17 == degree_bound(2, 8, 6, 4, 7)
    assert sum(hist7.values()) == 255
    for l in (1, 2, 4, 5, 6):
        top, _ = incidence_profile(c7, l)
        assert top <= degree_bound(2, 7, 6, 3, l)


def test_shorten_examples(c8):
    p = Subspace.standard(2, 8, [0])
    h = Subspace.standard(2, 8, range(1, 8))
    s = shorten(c8, p, h)
    rep = verify(s)
    assert rep.v == 7 and rep.d >= 5 and rep.K <= {3, 4}
    assert len(s) == len(incidence_set(c8, p)) + len(incidence_set(c8, h))
    lone = SubspaceCode(2, 4, [Subspace.standard(2, 4, [1, 2])])
    h4 = Subspace.from_lists(2, [[1, 1, 0, 0], [1, 0, 1, 0], [0, 0, 0, 1]])
    assert len(shorten(lone, Subspace.standard(2, 4, [0]), h4)) == 0


def test_shorten_preconditions(c7):
    p = Subspace.standard(2, 7, [0])
    with pytest.raises(CodeError):
        shorten(c7, p, Subspace.standard(2, 7, range(6)))  # p inside h
    with pytest.raises(CodeError):
        shorten(c7, Subspace.standard(2, 7, [0, 1]), Subspace.standard(2, 7, range(1, 7)))


def _random_point_hyperplane(rng, q, v):
    while True:
        p = subspace_at(q, v, 1, rng.randrange(gaussian_binomial(v, 1, q)))
        h = subspace_at(q, v, v - 1, rng.randrange(gaussian_binomial(v, v - 1, q)))
        vecs = span(q, h.basis.to_lists())
        if tuple(p.basis.to_lists()[0]) not in vecs:
            return p, h, vecs


def test_shorten_additivity_and_distance_on_200_random_codes():
    rng = random.Random(77)
    done = 0
    while done < 200:
        v = rng.choice([6, 7])
        c = random_code(rng, 2, v, rng.randrange(3, 25), dims=[2, 3] if v == 6 else [3, 4])
        if c.min_distance < 2:
            continue
        p, h, hvecs = _random_point_hyperplane(rng, 2, v)
        pvec = tuple(p.basis.to_lists()[0])
        through = sum(pvec in span(2, u.basis.to_lists()) for u in c)
        inside = sum(all(tuple(r) in hvecs for r in u.basis.to_lists()) for u in c)
        s = shorten(c, p, h)
        assert len(s) == through + inside
        if len(s) >= 2:
            assert s.min_distance >= c.min_distance - 1
        ks = {u.k for u in c}
        assert {u.k for u in s} <= ks | {k - 1 for k in ks}
        done += 1


def test_file_round_trip(c7, c8):
    for c in (c7, c8):
        text = emit_code(c)
        assert text.endswith("\n")
        assert parse_code(text) == c
        assert emit_code(parse_code(text)) == text


def test_parse_canonicalizes_and_reads_claims():
    text = "# lines\nq=2 v=4 N=2 d=4 K=2\n1100,0110\n0011,1000  # trailing comment\n"
    c, claim = parse_code_with_claim(text)
    assert claim == CodeParams(v=4, N=2, d=4, K=frozenset([2]), q=2)
    assert Subspace.from_lists(2, [[1, 0, 1, 0], [0, 1, 1, 0]]) in c
    assert verify(c, claim).ok


def test_parse_errors_name_lines():
    with pytest.raises(DuplicateCodewordError) as exc:
        parse_code("q=2 v=3\n100\n010\n100\n")
    assert "line 4" in str(exc.value) and "line 2" in str(exc.value)
    with pytest.raises(CodeFormatError) as exc:
        parse_code("q=2 v=3\n1001\n")
    assert "line 2" in str(exc.value)
    with pytest.raises(CodeFormatError):
        parse_code("q=2 v=3\n120\n")
    with pytest.raises(CodeFormatError):
        parse_code("100\n")
    with pytest.raises(CodeFormatError):
        parse_code("")


def test_ternary_file_round_trip():
    rng = random.Random(3)
    c = random_code(rng, 3, 4, 8)
    assert parse_code(emit_code(c)) == c
