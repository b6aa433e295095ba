import random

import numpy as np
import pytest

from oracles import all_subspace_spans, distance_by_spans, log_q, orthogonal_vectors, qbinom_fraction, qbinom_pascal, span
from subspacecodes.errors import AmbientMismatch, CapExceeded
from subspacecodes.grassmann import (
    Subspace,
    all_subspaces,
    bases_array,
    contains,
    dual,
    enumerate_subspaces,
    gaussian_binomial,
    incident,
    indices_of_bases,
    intersect_dim,
    join,
    meet,
    subspace_at,
    subspace_distance,
)


def random_subspace(rng, q, v, k=None):
    k = rng.randrange(v + 1) if k is None else k
    return subspace_at(q, v, k, rng.randrange(gaussian_binomial(v, k, q)))


def test_gaussian_binomial_anchor_values():
    assert gaussian_binomial(7, 3, 2) == 11811
    assert gaussian_binomial(8, 4, 2) == 200787
    assert gaussian_binomial(9, 0, 5) == 1
    assert gaussian_binomial(3, 1, 3) == 13
    with pytest.raises(ValueError):
        gaussian_binomial(3, 4, 2)


def test_gaussian_binomial_matches_two_oracles_and_symmetry():
    for q in (2, 3, 5):
        for a in range(13):
            for b in range(a + 1):
                g = gaussian_binomial(a, b, q)
                assert g == gaussian_binomial(a, a - b, q)
                assert g == qbinom_pascal(a, b, q) == qbinom_fraction(a, b, q)


@pytest.mark.parametrize("q", [2, 3])
def test_enumeration_complete_and_canonical(q):
    for v in range(1, 7):
        for k in range(v + 1):
            subs = list(enumerate_subspaces(q, v, k))
            assert len(subs) == gaussian_binomial(v, k, q)
            assert len(set(subs)) == len(subs)
            assert [u.index for u in subs] == list(range(len(subs)))
            if len(subs) <= 2000:
                for i, u in enumerate(subs):
                    assert u.k == k
                    assert subspace_at(q, v, k, i) == u


def test_enumeration_agrees_with_brute_force_spans():
    for q, v, k in [(2, 4, 2), (2, 5, 2), (3, 3, 1), (3, 3, 2)]:
        brute = all_subspace_spans(q, v, k)
        ours = {span(q, u.basis.to_lists()) for u in enumerate_subspaces(q, v, k)}
        assert ours == brute


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        enumerate_subspaces(2, 15, 1)
    with pytest.raises(CapExceeded):
        all_subspaces(2, 9, 4, cap=1000)


def test_enumeration_order_is_pivot_then_free():
    subs = list(enumerate_subspaces(2, 4, 2))
    assert subs[0].pivots == [0, 1] and str(subs[0]) == "<1000,0100>"
    pivs = [tuple(u.pivots) for u in subs]
    assert pivs == sorted(pivs)
    assert str(subs[1]) == "<1000,0101>"


def test_distance_examples():
    rng = random.Random(0)
    u = random_subspace(rng, 2, 6, 3)
    assert subspace_distance(u, u) == 0
    p1, p2 = Subspace.standard(2, 5, [0]), Subspace.standard(2, 5, [1])
    assert subspace_distance(p1, p2) == 2
    a = Subspace.from_lists(2, [[1, 0, 0, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0, 0, 0]])
    b = Subspace.from_lists(2, [[1, 0, 0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 0, 1, 0]])
    assert subspace_distance(a, b) == 6
    with pytest.raises(AmbientMismatch):
        subspace_distance(p1, Subspace.standard(2, 6, [0]))


def test_meet_and_join_against_vector_scan():
    rng = random.Random(5)
    for _ in range(300):
        u, w = random_subspace(rng, 2, 6), random_subspace(rng, 2, 6)
        su, sw = span(2, u.basis.to_lists()) or {(0,) * 6}, span(2, w.basis.to_lists()) or {(0,) * 6}
        m = meet(u, w)
        assert m.k == intersect_dim(u, w) == log_q(len(set(su) & set(sw)), 2)
        assert (span(2, m.basis.to_lists()) or frozenset({(0,) * 6})) == frozenset(set(su) & set(sw))
        assert join(u, w).k == u.k + w.k - m.k
    full = Subspace.full(2, 8)
    lo = Subspace.standard(2, 8, range(4))
    hi = Subspace.standard(2, 8, range(4, 8))
    assert intersect_dim(lo, hi) == 0 and meet(lo, hi) == Subspace.zero(2, 8)
    assert meet(full, lo) == lo


def test_dual_examples():
    assert dual(Subspace.full(2, 5)) == Subspace.zero(2, 5)
    assert dual(Subspace.standard(2, 3, [0])) == Subspace.standard(2, 3, [1, 2])
    for u in enumerate_subspaces(2, 5, 2):
        d = dual(u)
        assert d.k == 3
        assert span(2, d.basis.to_lists()) == orthogonal_vectors(2, u.basis.to_lists(), 5)
        assert dual(d) == u


def test_dual_ternary_against_scan():
    for u in enumerate_subspaces(3, 3, 1):
        assert span(3, dual(u).basis.to_lists()) == orthogonal_vectors(3, u.basis.to_lists(), 3)


def test_incident_against_row_membership():
    rng = random.Random(9)
    assert incident(random_subspace(rng, 2, 5), Subspace.full(2, 5))
    assert not incident(Subspace.standard(2, 5, [0]), Subspace.standard(2, 5, [1]))
    for _ in range(500):
        u, x = random_subspace(rng, 2, 5), random_subspace(rng, 2, 5)
        su, sx = span(2, u.basis.to_lists()), span(2, x.basis.to_lists())
        expect = all(tuple(r) in sx for r in u.basis.to_lists()) or all(tuple(r) in su for r in x.basis.to_lists())
        assert incident(u, x) == expect
        assert contains(x, u) == all(tuple(r) in sx for r in u.basis.to_lists())


@pytest.mark.parametrize("q,v", [(2, 6), (2, 7), (3, 4)])
def test_metric_axioms_and_duality_isometry(q, v):
    rng = random.Random(q * 100 + v)
    for _ in range(1000):
        u, w, x = (random_subspace(rng, q, v) for _ in range(3))
        duw = subspace_distance(u, w)
        assert duw == subspace_distance(w, u)
        assert (duw == 0) == (u == w)
        assert subspace_distance(u, x) <= duw + subspace_distance(w, x)
        assert subspace_distance(dual(u), dual(w)) == duw


def test_distance_matches_span_oracle():
    rng = random.Random(1)
    for q, v in [(2, 5), (3, 3)]:
        for _ in range(200):
            u, w = random_subspace(rng, q, v), random_subspace(rng, q, v)
            if u.k and w.k:
                assert subspace_distance(u, w) == distance_by_spans(q, u.basis.to_lists(), w.basis.to_lists())


def test_vectorized_indexing_matches_enumeration():
    for v, k in [(6, 3), (7, 2), (7, 4)]:
        arr = bases_array(2, v, k)
        assert np.array_equal(indices_of_bases(arr, v), np.arange(gaussian_binomial(v, k, 2)))
        # scrambled bases of the same spaces land on the same indices
        rng = np.random.default_rng(v * k)
        mixed = arr.copy()
        for i in range(k):
            for j in range(k):
                if i != j:
                    mask = rng.integers(0, 2, len(arr)).astype(bool)
                    mixed[mask, i] ^= arr[mask, j] if i > j else 0
        assert np.array_equal(indices_of_bases(mixed, v), np.arange(len(arr)))
