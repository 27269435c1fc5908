import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.combinatorics import Permutation as SymPerm, PermutationGroup

from jntcodes.perm import (GeneratedGroup, Permutation, build_chain, compose, inverse,
                           is_transitive_on_product, orbit_partition, point_orbit,
                           point_stabilizer)
from jntcodes.subsets import KSubset

perms = st.integers(2, 12).flatmap(lambda n: st.permutations(range(n)))


def test_compose_is_first_then_second():
    p = Permutation.from_cycles(3, [(0, 1)])
    q = Permutation.from_cycles(3, [(1, 2)])
    pq = compose(p, q)
    assert pq(0) == q(p(0)) == 2
    assert (p * q) == pq
    assert pq != compose(q, p)


@given(perms)
def test_inverse_round_trip(images):
    p = Permutation(images)
    assert compose(p, inverse(p)).is_identity()
    assert (~p * p).is_identity()


def test_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])
    with pytest.raises(ValueError):
        Permutation([0, 3, 1])


def test_cycles_and_order():
    p = Permutation.from_cycles(7, [(0, 1, 2), (3, 4)])
    assert p.order() == 6
    assert p.cycles() == [(0, 1, 2), (3, 4)]


def _sympy_order(gens):
    return PermutationGroup([SymPerm(list(g.images)) for g in gens]).order()


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10).flatmap(
    lambda n: st.lists(st.permutations(range(n)), min_size=1, max_size=3)))
def test_chain_order_matches_sympy(gen_images):
    g = GeneratedGroup.from_images(gen_images)
    assert build_chain(g).order() == _sympy_order(g.generators)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9).flatmap(
    lambda n: st.tuples(st.lists(st.permutations(range(n)), min_size=1, max_size=3),
                        st.permutations(range(n)))))
def test_membership_matches_sympy(data):
    gen_images, cand = data
    g = GeneratedGroup.from_images(gen_images)
    sg = PermutationGroup([SymPerm(list(x)) for x in gen_images])
    assert build_chain(g).contains(Permutation(cand)) == sg.contains(SymPerm(list(cand)))


def test_symmetric_and_alternating_orders():
    n = 9
    cyc = Permutation([(i + 1) % n for i in range(n)])
    tr = Permutation.from_cycles(n, [(0, 1)])
    assert build_chain(GeneratedGroup(n, (cyc, tr))).order() == 362880
    c3 = Permutation.from_cycles(n, [(0, 1, 2)])
    assert build_chain(GeneratedGroup(n, (cyc, c3))).order() == 181440


def test_declared_order_mismatch_raises():
    n = 6
    g = GeneratedGroup(n, (Permutation([(i + 1) % n for i in range(n)]),))
    with pytest.raises(ValueError):
        build_chain(g, declared_order=12)


def test_m11_order(entry):
    assert entry("M11/11").chain.order() == 7920


def test_m22_point_stabiliser(entry):
    m22 = entry("M22/22")
    stab = point_stabilizer(m22.chain, 5)
    assert build_chain(stab).order() == 443520 // 22 == 20160
    assert all(g(5) == 5 for g in stab.generators)


def test_orbit_stabiliser_random_points(entry):
    rng = np.random.default_rng(7)
    for label in ("M12/12", "M23/23", "A7/15", "HS/176"):
        e = entry(label)
        for u in rng.integers(0, e.degree, 3):
            stab = point_stabilizer(e.chain, int(u))
            assert len(point_orbit(e.group, int(u))) * build_chain(stab).order() == e.declared_order


def test_sifting_a_product_stays_in_group(entry):
    e = entry("M24/24")
    g, h = e.generators[0], e.generators[-1]
    word = g * h * g * ~h * g * g
    assert e.chain.contains(word)
    outside = Permutation.from_cycles(24, [(0, 1)])
    assert not e.chain.contains(outside)


def test_orbit_partition_sorted():
    g = GeneratedGroup(6, (Permutation.from_cycles(6, [(4, 0), (2, 5)]),))
    assert orbit_partition(g) == [[0, 4], [1], [2, 5], [3]]


def test_transitive_on_product():
    # S3 x S3 acting on {0,1,2} and {3,4,5} separately
    n = 6
    gens = (Permutation.from_cycles(n, [(0, 1)]), Permutation.from_cycles(n, [(0, 1, 2)]),
            Permutation.from_cycles(n, [(3, 4)]), Permutation.from_cycles(n, [(3, 4, 5)]))
    gamma = KSubset.from_points(n, [0, 1, 2])
    assert is_transitive_on_product(GeneratedGroup(n, gens), gamma)
    # the diagonal copy of S3 is transitive on each half but not on pairs
    diag = (Permutation.from_cycles(n, [(0, 1), (3, 4)]), Permutation.from_cycles(n, [(0, 1, 2), (3, 4, 5)]))
    assert not is_transitive_on_product(GeneratedGroup(n, diag), gamma)
