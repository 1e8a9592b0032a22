import itertools

import pytest

from polyclose.clones import (
    OP_AND,
    OP_AND_IMP,
    OP_AND_OR,
    OP_ITE,
    OP_MAJ,
    OP_OR,
    OP_XOR,
    OP_XOR3,
    OperationTable,
    threshold_op,
)
from polyclose.core import Relation
from polyclose.oracle import (
    BudgetExhausted,
    SaturationBudget,
    is_closed,
    saturate,
    saturate_masks,
    saturate_tuples,
)


def strings(rel):
    return {str(v) for v in rel.vectors()}


def test_union_closure_documented_example():
    r = Relation.from_strings(["1101", "0110", "1010"])
    cl = saturate(r, [OP_OR])
    assert strings(cl) == {"1101", "1111", "0110", "1010", "1110"}


def test_gf2_span_of_two_generators():
    cl = saturate(Relation.from_strings(["110", "011"]), [OP_XOR])
    assert strings(cl) == {"110", "011", "101", "000"}


def test_no_operations_is_identity():
    r = Relation.from_strings(["1101", "0110"])
    assert saturate(r, []) == r


def naive_round(width, elems, op):
    out = set(elems)
    for tup in itertools.product(elems, repeat=op.arity):
        bits = 0
        for pos in range(width):
            bits |= op.eval([(a >> pos) & 1 for a in tup]) << pos
        out.add(bits)
    return out


def naive_closure(width, rows, ops):
    cur = set(rows)
    while True:
        nxt = set(cur)
        for op in ops:
            nxt |= naive_round(width, sorted(cur), op)
        if nxt == cur:
            return cur
        cur = nxt


@pytest.mark.parametrize(
    "ops",
    [
        [OP_OR],
        [OP_AND],
        [OP_MAJ],
        [OP_XOR3],
        [OP_ITE],
        [OP_AND_OR],
        [OP_AND_IMP],
        [threshold_op(3, 4)],
        [threshold_op(4, 5)],
        [OP_MAJ, OP_XOR3],
    ],
)
def test_fast_rounds_match_naive_tuple_enumeration(ops, rng):
    for _ in range(25):
        n = rng.randint(1, 5)
        m = rng.randint(1, 4)
        rows = [rng.randrange(1 << n) for _ in range(m)]
        got = set(saturate_masks(n, rows, ops))
        want = naive_closure(n, rows, ops)
        assert got == want


def test_output_is_closed_and_idempotent(rng):
    for _ in range(30):
        n = rng.randint(1, 6)
        rows = [rng.randrange(1 << n) for _ in range(rng.randint(1, 4))]
        ops = rng.choice([[OP_OR], [OP_AND], [OP_MAJ], [OP_XOR], [OP_ITE]])
        out = saturate_masks(n, rows, ops)
        assert is_closed(n, out, ops)
        again = saturate_masks(n, out, ops)
        assert set(again) == set(out)


def test_monotone_in_the_seed(rng):
    for _ in range(30):
        n = rng.randint(1, 6)
        rows = [rng.randrange(1 << n) for _ in range(rng.randint(2, 5))]
        ops = [OP_OR]
        small = set(saturate_masks(n, rows[:-1], ops))
        big = set(saturate_masks(n, rows, ops))
        assert small <= big


def test_insertion_order_is_deterministic():
    rows = [0b110, 0b011]
    a = saturate_masks(3, rows, [OP_OR])
    b = saturate_masks(3, rows, [OP_OR])
    assert a == b
    assert a[: len(rows)] == rows


def test_budget_exhaustion_flags_partial():
    r = Relation(10, [1 << i for i in range(10)])
    with pytest.raises(BudgetExhausted) as err:
        saturate(r, [OP_OR], budget=SaturationBudget(max_elements=20))
    assert len(err.value.partial) >= 20


def test_upward_downward_operators():
    r = Relation.from_strings(["10"])

    class UD:
        up = (1,)
        down = ()

    cl = saturate(r, [], ud=UD)
    assert strings(cl) == {"10", "11"}


def test_domain_three_saturation():
    f = OperationTable.from_function(2, 3, lambda x, y: min(x + y, 2))
    rows = [(1, 0), (0, 1)]
    out = saturate_tuples(3, rows, [f])
    assert set(out) == {(1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (2, 1), (1, 2), (2, 2)}
