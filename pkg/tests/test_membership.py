import pytest

from polyclose.clones import CloneId, clone_base
from polyclose.core import BitVector, Relation
from polyclose.membership import (
    atoms_bf_vectors,
    atoms_m2_vectors,
    extension,
    make_member,
    member,
    member_e2,
    member_i2,
    member_kwise,
    member_l0,
    member_l2,
    member_m2,
    member_pairwise,
    member_s10,
    member_s12,
)
from polyclose.oracle import saturate_masks

from conftest import random_relation


def rel(*rows):
    return Relation.from_strings(rows)


def bv(s):
    return BitVector.from_string(s)


def closure_of(clone, r):
    return set(saturate_masks(r.width, r.rows, clone_base(clone)))


def test_member_i2_is_row_lookup():
    r = rel("10", "01")
    assert member_i2(r, bv("10"))
    assert not member_i2(r, bv("11"))


def test_member_e2_dominating_intersection():
    r = rel("0010", "1001", "0101")
    # 1001 & 0101 == 0001, so it is reachable
    assert member_e2(r, bv("0001"))
    assert not member_e2(r, bv("1000"))
    for row in r.vectors():
        assert member_e2(r, row)
    assert closure_of(CloneId("E2"), r) == {
        v for v in range(16) if member_e2(r, BitVector(4, v))
    }


def test_member_l0_row_span():
    r = rel("110", "011")
    assert member_l0(r, bv("101"))
    assert not member_l0(r, bv("100"))
    assert member_l0(r, bv("000"))


def test_member_l2_odd_combinations():
    r = rel("110", "011")
    assert member_l2(r, bv("110"))
    assert not member_l2(r, bv("101"))
    assert closure_of(CloneId("L2"), r) == {
        v for v in range(8) if member_l2(r, BitVector(3, v))
    }


def test_atoms_m2_documented():
    r = rel("1101", "0110", "1010")
    atoms = atoms_m2_vectors(r)
    assert [str(a) for a in atoms] == ["1000", "0100", "0010", "1101"]
    assert [str(a) for a in atoms_m2_vectors(rel("11"))] == ["11", "11"]
    assert [str(a) for a in atoms_m2_vectors(rel("10", "01"))] == ["10", "01"]


def test_member_m2_union_of_atoms():
    r = rel("1101", "0110", "1010")
    assert member_m2(r, bv("1110"))
    assert not member_m2(r, bv("0001"))
    for row in r.vectors():
        assert member_m2(r, row)


def test_member_m2_zero_requires_empty_intersection():
    assert not member_m2(rel("11"), bv("00"))
    assert member_m2(rel("10", "01"), bv("00"))


def test_atoms_bf_partition():
    r = rel("110", "011")
    assert [str(a) for a in atoms_bf_vectors(r)] == ["100", "010", "001"]
    assert [str(a) for a in atoms_bf_vectors(rel("1"))] == ["1"]


def test_atoms_bf_disjoint_or_equal(rng):
    for _ in range(40):
        r = random_relation(rng, n_max=7, m_max=5)
        atoms = [a.bits for a in atoms_bf_vectors(r)]
        for a in atoms:
            for b in atoms:
                assert a == b or a & b == 0


def test_member_pairwise_triangle():
    r = rel("110", "011", "101")
    assert member_pairwise(CloneId("D2"), r, bv("111"))
    assert not member_pairwise(CloneId("D2"), r, bv("000"))
    for row in r.vectors():
        assert member_pairwise(CloneId("D2"), r, row)


def test_member_s10_documented():
    r = rel("110", "011")
    assert member_s10(r, bv("010"))
    assert not member_s10(r, bv("111"))
    assert closure_of(CloneId("S10"), r) == {
        v for v in range(8) if member_s10(r, BitVector(3, v))
    } == {0b011, 0b010, 0b110}


def test_member_s12_forced_ones():
    r = rel("110", "010")  # coordinate 1 is one in every row
    cl = closure_of(CloneId("S12"), r)
    got = {v for v in range(8) if member_s12(r, BitVector(3, v))}
    assert got == cl
    assert all((v >> 1) & 1 for v in cl)


def test_member_kwise_zero_vector_and_rows(rng):
    clone = CloneId("S10K", 4)
    for _ in range(20):
        r = random_relation(rng, n_max=7, m_max=4, n_min=2)
        truth = closure_of(clone, r)
        assert member_kwise(clone, r, BitVector(r.width, 0)) == (0 in truth)
        for row in r.vectors():
            assert member_kwise(clone, r, row)


@pytest.mark.parametrize("tag,k", [("S10K", 4), ("S12K", 4), ("S10K", 5), ("S12K", 5)])
def test_member_kwise_matches_oracle(tag, k, rng):
    clone = CloneId(tag, k)
    for _ in range(15):
        r = random_relation(rng, n_max=7, m_max=5, n_min=2)
        truth = closure_of(clone, r)
        for v in range(1 << r.width):
            assert member_kwise(clone, r, BitVector(r.width, v)) == (v in truth)


def test_pairwise_equals_kwise_semantics(rng):
    d2 = CloneId("D2")
    for _ in range(25):
        r = random_relation(rng, n_max=6, m_max=5, n_min=2)
        truth = closure_of(d2, r)
        for v in range(1 << r.width):
            vv = BitVector(r.width, v)
            assert member_pairwise(d2, r, vv) == (v in truth)


def test_extension_is_prefix_membership():
    r = rel("0010", "1001", "0101")
    assert extension(CloneId("E2"), r, bv("00"))
    assert extension(CloneId("E2"), r, BitVector(0, 0))
    assert extension(CloneId("E2"), r, bv("0010")) == member(
        CloneId("E2"), r, bv("0010")
    )


def test_extension_downward_consistency(rng):
    for tag in ("E2", "L0", "M2", "S10", "D2"):
        clone = CloneId(tag)
        for _ in range(10):
            r = random_relation(rng, n_max=6, m_max=4, n_min=2)
            closure = closure_of(clone, r)
            for v in closure:
                for l in range(1, r.width + 1):
                    prefix = BitVector(l, v & ((1 << l) - 1))
                    assert extension(clone, r, prefix)


def test_make_member_agrees_with_member(rng):
    for clone in (CloneId("S10K", 4), CloneId("S12K", 5), CloneId("D1"), CloneId("M2")):
        for _ in range(10):
            r = random_relation(rng, n_max=6, m_max=4, n_min=2)
            decide = make_member(clone, r)
            for v in range(1 << r.width):
                vv = BitVector(r.width, v)
                assert decide(vv) == member(clone, r, vv)
