import io
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jntcodes import analysis as an
from jntcodes import engine
from jntcodes import subsets as ss
from jntcodes.subsets import KSubset


@pytest.fixture(scope="module")
def codes(entry):
    """Small SIT codes keyed by (label, k, size)."""
    out = {}
    for label, k in [("L2(11)/11", 5), ("A7/15", 3), ("M11/12", 6), ("M12/12", 6),
                     ("M22/22", 6), ("M22/22", 10), ("M23/23", 8), ("M24/24", 8), ("M24/24", 12)]:
        for c in engine.exhaustive_search(entry(label), k):
            out[label, k, c.orbit_size] = c
    return out


def code(codes, *key):
    return an.Code.from_candidate(codes[key])


@pytest.mark.parametrize("key,delta", [
    (("L2(11)/11", 5, 11), 3), (("M22/22", 6, 77), 4), (("M23/23", 8, 506), 4),
    (("A7/15", 3, 35), 2), (("M24/24", 12, 2576), 4),
])
def test_min_distance(codes, key, delta):
    c = code(codes, *key)
    assert an.min_distance(c) == delta == an.min_distance_naive(c)


def test_biplane_blocks_meet_in_two(codes):
    words = code(codes, "L2(11)/11", 5, 11).words()
    assert {ss.intersection_size(a, b) for a in words for b in words if a != b} == {2}


def test_singleton_distance_is_infinite():
    c = an.Code.from_subsets(5, [KSubset(5, 0b11)])
    assert an.min_distance(c) == an.INFINITE_DISTANCE == an.min_distance_naive(c)


def test_naive_budget():
    c = an.Code(24, 8, np.zeros((an.NAIVE_LIMIT + 1, 3), dtype=np.uint8))
    with pytest.raises(an.BudgetExceeded):
        an.min_distance_naive(c)


@settings(max_examples=30, deadline=None)
@given(st.sets(st.integers(0, (1 << 12) - 1).filter(lambda b: bin(b).count("1") == 4),
               min_size=2, max_size=40))
def test_naive_matches_bruteforce(bitsets):
    words = [KSubset(12, b) for b in bitsets]
    c = an.Code.from_subsets(12, words)
    best = min(ss.johnson_distance(a, b) for a in words for b in words if a != b)
    assert an.min_distance_naive(c) == best


def test_neighbours_small():
    c = an.Code.from_subsets(4, [KSubset.parse("{1,2}", 4)])
    nbrs = {str(s) for s in ss.unpack(an.neighbour_set(c), 4)}
    assert nbrs == {"{1,3}", "{1,4}", "{2,3}", "{2,4}"}


@pytest.mark.parametrize("key", [("L2(11)/11", 5, 11), ("M11/12", 6, 22), ("M11/12", 6, 110),
                                 ("M22/22", 6, 77), ("M24/24", 8, 759), ("M24/24", 12, 2576)])
def test_neighbour_transitive(codes, key):
    c = codes[key]
    assert an.is_neighbour_transitive(an.Code.from_candidate(c), c.group.group)


def test_union_of_orbits_not_neighbour_transitive(codes):
    a, b = codes["M11/12", 6, 22], codes["M11/12", 6, 110]
    rows = np.concatenate([a.orbit, b.orbit])
    broken = an.Code(12, 6, rows[ss.colex_order(rows)])
    assert not an.is_neighbour_transitive(broken, a.group.group)


def test_neighbour_cap(codes):
    with pytest.raises(an.BudgetExceeded):
        an.neighbour_set(code(codes, "M24/24", 8, 759), cap=1000)


@pytest.mark.parametrize("key,sc", [
    (("M24/24", 12, 2576), True), (("M12/12", 6, 132), True), (("M11/12", 6, 22), True),
    (("M22/22", 10, 616), False), (("M24/24", 8, 759), False),
])
def test_self_complementary(codes, key, sc):
    assert an.is_self_complementary(code(codes, *key)) is sc


def test_duum_half_complement_is_codeword(codes):
    c = code(codes, "M24/24", 12, 2576)
    first = c.words()[0]
    assert c.contains_rows(ss.pack([first.complement()], 24))[0]


@pytest.mark.parametrize("key,t,lam", [
    (("L2(11)/11", 5, 11), 2, 2), (("M24/24", 8, 759), 5, 1), (("M22/22", 6, 77), 3, 1),
    (("M12/12", 6, 132), 5, 1), (("M24/24", 12, 2576), 2, 2576 * comb(12, 2) // comb(24, 2)),
])
def test_design_lambda(codes, key, t, lam):
    assert an.design_lambda(code(codes, *key), t) == lam


def test_biplane_lambda_counting(codes):
    c = code(codes, "L2(11)/11", 5, 11)
    assert an.design_lambda(c, 2) * comb(11, 2) == 11 * comb(5, 2)


def test_design_routes_agree(codes):
    c = code(codes, "M23/23", 8, 506)
    assert np.array_equal(an.design_counts(c, 2, "gram"), an.design_counts(c, 2, "ranks"))
    # octads avoiding a point: residual of the 5-(24,8,1) design
    assert an.design_lambda(c, 4) == 4
    assert an.design_lambda(c, 5) is None


def test_design_budget():
    c = an.Code.from_subsets(276, [KSubset.from_points(276, range(6))])
    with pytest.raises(an.BudgetExceeded):
        an.design_lambda(c, 3)


def test_complement_code(codes):
    c = code(codes, "A7/15", 3, 35)
    comp = an.complement_code(c)
    assert (comp.v, comp.k, len(comp)) == (15, 12, 35)
    assert an.min_distance(comp) == 2
    back = an.complement_code(comp)
    assert np.array_equal(back.rows, c.rows)


@pytest.mark.parametrize("key,shape", [(("M11/12", 6, 22), (12, 22, 6)), (("M22/22", 10, 616), (22, 616, 8)),
                                       (("M24/24", 12, 2576), (24, 2576, 8))])
def test_hamming_export(codes, key, shape):
    buf = io.StringIO()
    an.export_hamming(code(codes, *key), buf)
    header, words = an.read_hamming(buf.getvalue())
    assert (len(words[0]), len(words), an.hamming_min_distance(words)) == shape
    assert header["min_hamming_distance"] == str(shape[2])
    assert all(w.count("1") == key[1] for w in words)


def test_expected_table_shape():
    t = an.ExpectedTable()
    assert len(t.rows) == 27
    assert [r.line for r in t.rows if r.self_complementary] == [3, 16, 25, 26, 27]
    assert [r.line for r in t.rows if r.delta == 2] == [23, 24, 25, 26, 27]
    assert t.find("M24", 24, 8, 759).line == 15


def test_perturbed_fixture_single_mismatch(codes):
    recs = [an.analyse(codes[k]) for k in [("M11/12", 6, 22), ("M11/12", 6, 110)]]
    assert an.reproduce_table(recs).ok
    rep = an.reproduce_table(recs, an.EXPECTED.perturbed(25))
    assert [r.status for r in rep.mismatches] == ["mismatch line 25"]


def test_reproduce_reports_missing(codes):
    rec = an.analyse(codes["M11/12", 6, 22])
    rep = an.reproduce_table([rec])
    assert [r.status for r in rep.rows] == ["line 3", "missing"]
    assert not rep.ok
    assert rep.tsv().splitlines()[0] == an.HEADER
