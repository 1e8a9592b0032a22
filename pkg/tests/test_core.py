import pytest
from hypothesis import given, strategies as st

from polyclose.core import (
    BitVector,
    FormatError,
    IndexSet,
    Relation,
    complement_rows,
    equal_column_classes,
    format_relation,
    parse_relation,
    project,
)


def rel(*rows):
    return Relation.from_strings(rows)


def row_strings(r):
    return {str(v) for v in r.vectors()}


def test_project_pair_of_columns():
    r = rel("1101", "0110", "1010")
    out = project(r, IndexSet.of(4, [0, 1]))
    assert row_strings(out) == {"11", "01", "10"}


def test_project_full_index_is_identity():
    r = rel("1101")
    assert project(r, IndexSet.full(4)) == r


def test_project_collapses_duplicates():
    r = rel("110", "010")
    out = project(r, IndexSet.of(3, [1]))
    assert row_strings(out) == {"1"}
    assert out.m == 1


def test_project_width_mismatch():
    with pytest.raises(ValueError):
        project(rel("10"), IndexSet.of(3, [0]))


def test_complement_rows_examples():
    assert row_strings(complement_rows(rel("1101", "0110", "1010"))) == {
        "0010",
        "1001",
        "0101",
    }
    assert complement_rows(Relation(3, [])).m == 0


@given(st.integers(1, 10), st.lists(st.integers(0, 1023), min_size=1, max_size=8))
def test_complement_is_involution(width, rows):
    rows = [r & ((1 << width) - 1) for r in rows]
    r = Relation(width, rows)
    assert complement_rows(complement_rows(r)) == r


@given(st.integers(2, 9), st.lists(st.integers(0, 511), min_size=1, max_size=7), st.data())
def test_nested_projection_composes(width, rows, data):
    rows = [r & ((1 << width) - 1) for r in rows]
    r = Relation(width, rows)
    outer = sorted(
        data.draw(st.sets(st.integers(0, width - 1), min_size=1, max_size=width))
    )
    inner_rel = data.draw(
        st.sets(st.integers(0, len(outer) - 1), min_size=1, max_size=len(outer))
    )
    inner = sorted(inner_rel)
    once = project(project(r, IndexSet.of(width, outer)), IndexSet.of(len(outer), inner))
    composed = project(r, IndexSet.of(width, [outer[i] for i in inner]))
    assert once == composed


def test_complement_commutes_with_project():
    r = rel("1101", "0110")
    idx = IndexSet.of(4, [0, 2, 3])
    assert project(complement_rows(r), idx) == complement_rows(project(r, idx))


def test_equal_column_classes_merged_pair():
    r = rel("110", "110")
    assert equal_column_classes(r) == [(0, 1), (2,)]


def test_equal_column_classes_distinct():
    assert equal_column_classes(rel("10", "01")) == [(0,), (1,)]


def test_equal_column_classes_single_row():
    assert equal_column_classes(rel("111")) == [(0, 1, 2)]


def test_equal_column_classes_empty_relation_rejected():
    with pytest.raises(ValueError):
        equal_column_classes(Relation(2, []))


def test_relation_dedups_preserving_order():
    r = Relation(3, [0b011, 0b011, 0b101])
    assert r.rows == (0b011, 0b101)


def test_bitvector_basics():
    v = BitVector.from_string("1011")
    assert str(v) == "1011"
    assert v.support() == (0, 2, 3)
    assert v.count() == 3
    assert str(v.complement()) == "0100"
    assert BitVector.from_string("0011").is_subset_of(v)


def test_lex_key_orders_like_strings():
    vs = [BitVector.from_string(s) for s in ("00", "01", "10", "11")]
    keys = [v.lex_key() for v in vs]
    assert keys == sorted(keys)


def test_columns_transpose():
    r = rel("110", "011")
    # column i holds a bit per row
    assert r.columns == (0b01, 0b11, 0b10)


def test_relation_roundtrip_text():
    r = rel("1101", "0110")
    text = format_relation(r)
    assert parse_relation(text) == r


def test_parse_relation_reports_line_numbers():
    with pytest.raises(FormatError) as err:
        parse_relation("4 2 2\n1101\n11x1\n")
    assert "line 3" in str(err.value)


def test_parse_relation_rejects_bad_header():
    with pytest.raises(FormatError):
        parse_relation("4 2\n1101\n0110\n")


def test_parse_relation_skips_comments():
    r = parse_relation("# header\n3 1 2\n# row next\n101\n")
    assert row_strings(r) == {"101"}
