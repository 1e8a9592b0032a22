import itertools
import random

import pytest

from polyclose.clones import (
    OP_AND,
    OP_AND_IMP,
    OP_AND_NOT,
    OP_AND_OR,
    OP_CONST0,
    OP_CONST1,
    OP_EQ,
    OP_ITE,
    OP_MAJ,
    OP_NOT,
    OP_OR,
    OP_XOR,
    OP_XOR3,
    UNCLASSIFIED,
    CloneId,
    OperationTable,
    UnsupportedArity,
    classify,
    clone_base,
    dualize,
    format_operation,
    parse_operation,
    reduce_instance,
    registry_clones,
    threshold_op,
)
from polyclose.core import Relation
from polyclose.oracle import saturate_masks


def test_eval_majority():
    assert OP_MAJ.eval([1, 0, 1]) == 1
    assert OP_MAJ.eval([0, 0, 1]) == 0


def test_eval_threshold():
    th = threshold_op(3, 4)
    assert th.eval([1, 1, 1, 0]) == 1
    assert th.eval([1, 1, 0, 0]) == 0


def test_eval_if_then_else():
    assert OP_ITE.eval([0, 1, 0]) == 0
    assert OP_ITE.eval([1, 1, 0]) == 1
    assert OP_ITE.eval([0, 0, 1]) == 1


def test_eval_vectors_coordinatewise():
    from polyclose.core import BitVector

    a = BitVector.from_string("1100")
    b = BitVector.from_string("1010")
    assert str(OP_AND.eval_vectors([a, b])) == "1000"
    assert str(OP_OR.eval_vectors([a, b])) == "1110"


def test_dualize_and_or():
    assert dualize(OP_AND).table == OP_OR.table
    assert dualize(OP_OR).table == OP_AND.table


def test_dualize_fixes_selfdual_ops():
    assert dualize(OP_MAJ).table == OP_MAJ.table
    assert dualize(OP_XOR3).table == OP_XOR3.table


def test_dualize_involution_all_binary_tables():
    for bits in itertools.product((0, 1), repeat=4):
        op = OperationTable(2, 2, bits)
        assert dualize(dualize(op)).table == op.table


FIG_ROWS = [
    ([], "I2"),
    ([OP_XOR3], "L2"),
    ([OP_XOR], "L0"),
    ([OP_AND], "E2"),
    ([OP_AND_OR], "S10"),
    ([OP_MAJ, OP_AND_OR], "S10^2"),
    ([threshold_op(3, 4)], "S10^3"),
    ([OP_AND_IMP], "S12"),
    ([threshold_op(3, 4), OP_AND_IMP], "S12^3"),
    ([OP_MAJ], "D2"),
    ([OP_MAJ, OP_XOR3], "D1"),
    ([OP_OR, OP_AND], "M2"),
    ([OP_ITE], "R"),
    ([OP_OR, OP_XOR], "R0"),
    ([OP_OR, OP_NOT], "BF"),
]


@pytest.mark.parametrize("ops,name", FIG_ROWS)
def test_classify_lattice_bases(ops, name):
    assert str(classify(ops)) == name


def test_classify_reduced_equivalents():
    assert str(classify([OP_OR])) == "E2"  # dual side
    assert str(classify([OP_AND_NOT])) == "S12"  # constant folds away
    assert str(classify([OP_NOT])) == "I2"
    assert str(classify([OP_EQ])) == "L0"
    assert str(classify([OP_AND, OP_CONST1])) == "E2"


def test_classify_beyond_level_bound_unclassified():
    assert classify([threshold_op(3, 4)], k_max=2) == UNCLASSIFIED


def test_classify_rejects_large_arity():
    with pytest.raises(UnsupportedArity):
        classify([threshold_op(4, 5)])


def test_registry_bases_classify_to_themselves():
    for clone in registry_clones(4):
        base = clone_base(clone)
        if any(op.arity > 4 for op in base):
            continue
        assert classify(base) == clone


def test_reduce_instance_dualizes_union_side():
    r = Relation.from_strings(["1101", "0110", "1010"])
    clone, red, trace = reduce_instance([OP_OR], r)
    assert str(clone) == "E2"
    assert trace.kinds() == ["Dualize"]
    assert {str(v) for v in red.vectors()} == {"0010", "1001", "0101"}


def test_reduce_instance_folds_constants():
    clone, red, trace = reduce_instance([OP_AND, OP_CONST1], Relation.from_strings(["01"]))
    assert str(clone) == "E2"
    assert trace.kinds() == ["AddConstant1"]
    assert {str(v) for v in red.vectors()} == {"01", "11"}


def test_reduce_instance_merges_equal_columns():
    r = Relation.from_strings(["110", "111"])  # columns 0 and 1 equal
    clone, red, trace = reduce_instance(CloneId("E2"), r)
    assert "MergeEqualColumns" in trace.kinds()
    assert red.width == 2
    lifted = {b for b in trace.lift_bits(red.rows)}
    assert lifted == set(r.rows)


def test_reduce_instance_rejects_empty():
    with pytest.raises(ValueError):
        reduce_instance(CloneId("E2"), Relation(3, []))


def test_reduction_roundtrip_matches_oracle(rng):
    op_menu = [
        [OP_OR],
        [OP_AND],
        [OP_NOT],
        [OP_MAJ],
        [OP_EQ],
        [OP_ITE],
        [OP_OR, OP_NOT],
        [OP_AND_NOT],
        [OP_XOR],
        [OP_MAJ, OP_XOR3],
        [OP_AND, OP_CONST0],
        [OP_OR, OP_CONST1],
        [dualize(OP_AND_OR)],
        [dualize(OP_AND_IMP)],
    ]
    for _ in range(120):
        n = rng.randint(1, 6)
        m = rng.randint(1, 5)
        r = Relation(n, [rng.randrange(1 << n) for _ in range(m)])
        ops = rng.choice(op_menu)
        clone, red, trace = reduce_instance(ops, r)
        want = set(saturate_masks(n, r.rows, ops))
        reduced_closure = saturate_masks(red.width, red.rows, clone_base(clone))
        got = set(trace.lift_bits(reduced_closure))
        assert got == want


def test_operation_text_roundtrip():
    text = format_operation(OP_MAJ)
    op = parse_operation(text)
    assert op.table == OP_MAJ.table
    assert op.arity == 3 and op.domain_size == 2


def test_clone_id_parse():
    assert CloneId.parse("S10^3") == CloneId("S10K", 3)
    assert CloneId.parse("s12^4") == CloneId("S12K", 4)
    assert CloneId.parse("BF") == CloneId("BF")
    with pytest.raises(ValueError):
        CloneId.parse("Q7")
