import itertools

import pytest

from oracles import naive_rank
from subspacecodes.codes import CodeParams, SubspaceCode, verify
from subspacecodes.constructions import (
    GabidulinSpec,
    frobenius,
    gf16_mul,
    lift,
    lifted_mrd,
    lifted_mrd_plus_one,
    mrd_matrices,
    plus_one,
    rank_distance,
)
from subspacecodes.errors import ConstructionError
from subspacecodes.gf_linalg import MatRows
from subspacecodes.grassmann import Subspace, subspace_distance


def bits(m):
    return [[(r >> j) & 1 for j in range(m.cols)] for r in m.rows]


def test_field_arithmetic():
    # x * x^3 = x^4 = x + 1
    assert gf16_mul(0b0010, 0b1000) == 0b0011
    nonzero = range(1, 16)
    for a in nonzero:
        assert any(gf16_mul(a, b) == 1 for b in nonzero)
        assert frobenius(a, 4) == a
    for a, b, c in itertools.product(range(16), repeat=3):
        if a < 4:
            assert gf16_mul(a, b ^ c) == gf16_mul(a, b) ^ gf16_mul(a, c)


def test_spec_validation():
    with pytest.raises(ConstructionError):
        GabidulinSpec(n=5, k=1)
    with pytest.raises(ConstructionError):
        GabidulinSpec(n=3, k=4)
    with pytest.raises(ConstructionError):
        GabidulinSpec(n=3, k=1, m=5)


def test_rank_distance_three_codes_n3():
    mats = mrd_matrices(GabidulinSpec(n=3, k=1))
    assert len(mats) == 16
    assert mats[0].rows == (0, 0, 0)
    for m in mats[1:]:
        assert naive_rank(2, bits(m)) == 3


def test_rank_distance_n4_k2_all_pairs():
    mats = mrd_matrices(GabidulinSpec(n=4, k=2))
    assert len(mats) == 256
    low = min(
        naive_rank(2, [[x ^ y for x, y in zip(ra, rb)] for ra, rb in zip(bits(a), bits(b))])
        for a, b in itertools.combinations(mats, 2)
    )
    assert low >= 3


@pytest.mark.parametrize("n,k,v", [(3, 1, 7), (4, 2, 8)])
def test_lifting_doubles_rank_distance(n, k, v):
    mats = mrd_matrices(GabidulinSpec(n=n, k=k))
    code = lift(mats, v)
    by_matrix = {Subspace(2, v, MatRows(2, v, tuple((1 << i) | (r << n) for i, r in enumerate(a.rows)))): a for a in mats}
    assert len(code) == len(mats)
    for u, w in itertools.combinations(code.codewords, 2):
        assert subspace_distance(u, w) == 2 * rank_distance(by_matrix[u], by_matrix[w])


def test_lift_shapes():
    assert verify(lift(mrd_matrices(GabidulinSpec(n=3, k=1)), 7)).params() == "(7,16,6;3)_2"
    zero = lift([MatRows(2, 4, (0, 0, 0))], 7)
    assert list(zero) == [Subspace.standard(2, 7, [0, 1, 2])]
    with pytest.raises(ConstructionError):
        lift([MatRows(2, 3, (0, 0, 0))], 7)


def test_plus_one_codes():
    c7 = lifted_mrd_plus_one(7, 3)
    assert verify(c7, CodeParams(v=7, N=17, d=6, K=frozenset([3]), q=2)).ok
    c8 = lifted_mrd_plus_one(8, 4)
    assert verify(c8, CodeParams(v=8, N=257, d=6, K=frozenset([4]), q=2)).ok
    extra = Subspace.standard(2, 8, [4, 5, 6, 7])
    assert extra in c8
    for u in c8:
        if u != extra:
            assert subspace_distance(u, extra) == 8


def test_plus_one_never_lowers_distance():
    base = lifted_mrd(7, 3, 6)
    assert base.min_distance == plus_one(base).min_distance == 6
    with pytest.raises(ConstructionError):
        plus_one(plus_one(base))
    with pytest.raises(ConstructionError):
        plus_one(SubspaceCode(2, 7))


def test_lifted_mrd_domain():
    with pytest.raises(ConstructionError):
        lifted_mrd(9, 4, 6)
    with pytest.raises(ConstructionError):
        lifted_mrd(8, 4, 5)
