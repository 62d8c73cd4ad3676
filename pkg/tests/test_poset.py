"""Interval construction, grading, dihedral detection and isomorphism."""

import pytest

from bruhatkl.coxeter import CoxeterSystem, genset
from bruhatkl.poset import (
    build_interval,
    build_lower_interval,
    find_isomorphism,
    find_marked_isomorphism,
    find_order_isomorphism,
    interval_to_json,
    is_dihedral_interval,
    mark_interval,
)

from oracles import subword_reachable


@pytest.mark.parametrize("sys", [
    CoxeterSystem.A(3), CoxeterSystem.B(3), CoxeterSystem.I2(6),
])
def test_interval_membership_matches_subword_oracle(sys):
    for w in sys.group_elements():
        iv = build_lower_interval(sys, w)
        assert set(iv.elements) == subword_reachable(sys, w)
        # ids sorted by (length, word); extremes in place
        assert list(iv.elements) == sorted(iv.elements)
        assert iv.elements[0] is sys.identity
        assert iv.elements[-1] is w


def test_interval_sizes(a2, b2):
    assert len(build_lower_interval(b2, b2.element_from_labels("s1s2s1s2"))) == 8
    assert len(build_lower_interval(a2, a2.element_from_labels("s1s2s1"))) == 6
    assert len(build_lower_interval(a2, a2.identity)) == 1


@pytest.mark.parametrize("sys", [
    CoxeterSystem.A(3), CoxeterSystem.B(3),
])
def test_hasse_edges_are_covers(sys):
    for w in sys.group_elements():
        iv = build_lower_interval(sys, w)
        n = len(iv.elements)
        for b in range(n):
            for a in iv.hasse_down[b]:
                assert iv.rank_of[b] == iv.rank_of[a] + 1
                assert sys.bruhat_leq(iv.elements[a], iv.elements[b])
            # no skipped covers: every u < b at rank(b)-1 with u <= b is listed
            for a in range(n):
                if (iv.rank_of[a] == iv.rank_of[b] - 1
                        and sys.bruhat_leq(iv.elements[a], iv.elements[b])):
                    assert a in iv.hasse_down[b]


def test_graded(b3):
    for w in b3.group_elements():
        iv = build_lower_interval(b3, w)
        n = len(iv.elements)
        for i in range(n):
            if i != n - 1:
                assert iv.hasse_up[i], "non-top element missing an up cover"
            if i != 0:
                assert iv.hasse_down[i], "non-bottom element missing a cover"


def test_leq_bitmasks(b3):
    w = b3.element_from_labels("s1s2s3s2s1")
    iv = build_lower_interval(b3, w)
    for i, u in enumerate(iv.elements):
        for j, v in enumerate(iv.elements):
            assert iv.leq(i, j) == b3.bruhat_leq(u, v)


def test_atoms_coatoms(a2):
    sts = a2.element_from_labels("s1s2s1")
    iv = build_lower_interval(a2, sts)
    assert iv.coatoms_of(sts) == (
        a2.element_from_labels("s1s2"), a2.element_from_labels("s2s1"))
    assert iv.atoms_of(a2.identity) == (a2.generator(0), a2.generator(1))


def test_marking(f4):
    H = genset([0, 1, 2])
    v = f4.element_from_labels("s3s4s2s3s1s2s3s4")
    mi = mark_interval(build_lower_interval(f4, v), H)
    u = f4.element_from_labels("s3s1s2s3s4")
    assert mi.marks[mi.interval.id_of(u)]
    assert mi.marks[0]  # identity is always a minimal representative
    for i, el in enumerate(mi.interval.elements):
        assert mi.marks[i] == f4.is_min_coset_rep(el, H)


def test_subinterval(b3):
    w = b3.element_from_labels("s1s2s3s2s1")
    iv = build_lower_interval(b3, w)
    lo = iv.id_of(b3.generator(0))
    sub, ids = iv.subinterval(lo, len(iv.elements) - 1)
    assert sub.bottom is b3.generator(0)
    assert sub.top is w
    members = {z for z in iv.elements
               if b3.bruhat_leq(b3.generator(0), z)}
    assert set(sub.elements) == members
    assert sub.rank_of[0] == 0


def test_general_interval(b2):
    s = b2.generator(0)
    top = b2.element_from_labels("s1s2s1")
    iv = build_interval(b2, s, top)
    assert len(iv.elements) == 4
    with pytest.raises(ValueError):
        build_interval(b2, b2.element_from_labels("s2"),
                       b2.element_from_labels("s1"))


def test_dihedral_detection(a3, b2):
    assert is_dihedral_interval(
        build_lower_interval(b2, b2.element_from_labels("s1")))
    assert is_dihedral_interval(
        build_lower_interval(b2, b2.element_from_labels("s1s2s1s2")))
    assert is_dihedral_interval(
        build_lower_interval(a3, a3.element_from_labels("s1s3")))
    assert not is_dihedral_interval(
        build_lower_interval(a3, a3.element_from_labels("s1s2s3")))
    assert is_dihedral_interval(build_lower_interval(a3, a3.identity))


def test_dihedral_matches_rank2_shape(b3):
    # every [e,w] flagged dihedral must be isomorphic to a rank-2 interval
    for w in b3.group_elements():
        iv = build_lower_interval(b3, w)
        if not is_dihedral_interval(iv):
            continue
        k = w.length
        if k == 0:
            continue
        m = max(k, 2)
        ref_sys = CoxeterSystem.I2(m)
        ref_top = ref_sys.element_from_word(
            tuple(i % 2 for i in range(k)))
        ref = build_lower_interval(ref_sys, ref_top)
        assert find_isomorphism(iv, ref) is not None


def test_isomorphism_basic(b2, a2):
    iv1 = build_lower_interval(b2, b2.element_from_labels("s1s2s1"))
    iv2 = build_lower_interval(b2, b2.element_from_labels("s2s1s2"))
    # identity on an interval paired with itself
    assert find_isomorphism(iv1, iv1) == tuple(range(len(iv1.elements)))
    phi = find_isomorphism(iv1, iv2)
    assert phi is not None
    # covers transported correctly
    for b in range(len(iv1.elements)):
        for a in iv1.hasse_down[b]:
            assert phi[a] in iv2.hasse_down[phi[b]]
    sts = build_lower_interval(a2, a2.element_from_labels("s1s2s1"))
    # [e, sts] in A2 and [e, s1s2s1] in B2 share the 1-2-2-1 bipartite shape
    assert find_isomorphism(sts, iv1) is not None
    full_b2 = build_lower_interval(b2, b2.element_from_labels("s1s2s1s2"))
    assert find_isomorphism(sts, full_b2) is None  # 6 vs 8 elements


def test_isomorphism_respects_marks(b2):
    iv = build_lower_interval(b2, b2.element_from_labels("s1s2s1s2"))
    plain = mark_interval(iv, 0)
    h1 = mark_interval(iv, genset([0]))
    h2 = mark_interval(iv, genset([1]))
    assert find_marked_isomorphism(plain, plain) is not None
    assert find_marked_isomorphism(h1, plain) is None
    phi = find_marked_isomorphism(h1, h2)
    # swapping the two generators of I2(4) is a marked isomorphism
    assert phi is not None
    for i, m in enumerate(h1.marks):
        assert h2.marks[phi[i]] == m


def test_isomorphism_nontrivial_negative(a3, b3):
    # same size (8 elements), different structure: the rank-3 cube versus
    # the rank-4 dihedral interval
    iv_a = build_lower_interval(a3, a3.element_from_labels("s1s2s3"))
    iv_b = build_lower_interval(b3, b3.element_from_labels("s2s3s2s3"))
    assert len(iv_a.elements) == len(iv_b.elements)
    assert find_isomorphism(iv_a, iv_b) is None


def test_order_isomorphism():
    # chain of 3 vs antichain-in-the-middle diamond
    chain = [0b111, 0b110, 0b100]
    vee = [0b111, 0b010, 0b110]  # relabeled chain
    assert find_order_isomorphism(chain, vee) is not None
    diamond = [0b1111, 0b1010, 0b1100, 0b1000]
    assert find_order_isomorphism(chain, diamond) is None
    assert find_order_isomorphism(diamond, diamond) == (0, 1, 2, 3)


def test_interval_json(b2):
    iv = build_lower_interval(b2, b2.element_from_labels("s1s2"))
    data = interval_to_json(iv, mark_interval(iv, genset([1])))
    assert data["top"] == "s1s2"
    assert data["H"] == ["s2"]
    assert [e["word"] for e in data["elements"]] == ["e", "s1", "s2", "s1s2"]
    assert data["hasse"] == [[0, 1], [0, 2], [1, 3], [2, 3]]
    assert [e["marked"] for e in data["elements"]] == [
        True, True, False, False]
