import pytest

from polyclose.core import Relation
from polyclose.formulas import (
    Clause2,
    DNFClause,
    build_phi_d2,
    dnf_models_brute,
    eliminate_positive_by_resolution,
    enum_2cnf_models,
    enum_dnf_models,
    format_dimacs,
    models_brute,
    mondnf_to_e2_instance,
    parse_dimacs,
    two_sat_satisfiable,
)
from polyclose.oracle import saturate_masks
from polyclose.clones import OP_MAJ, OP_OR


def clause_sets(clauses):
    return {c.literals for c in clauses}


def test_phi_triangle():
    r = Relation.from_strings(["110", "011", "101"])
    phi = build_phi_d2(r)
    assert clause_sets(phi) == {
        frozenset({(0, True), (1, True)}),
        frozenset({(0, True), (2, True)}),
        frozenset({(1, True), (2, True)}),
    }


def test_phi_empty_when_all_pairs_present():
    r = Relation.from_strings(["00", "01", "10", "11"])
    assert build_phi_d2(r) == []


def test_phi_polarity_rule():
    # only the pair (1,0) missing at (0,1) -> clause (not x1 or x2)
    r = Relation.from_strings(["00", "01", "11"])
    phi = build_phi_d2(r)
    assert clause_sets(phi) == {frozenset({(0, False), (1, True)})}


def test_two_sat_satisfiable_basic():
    c = [Clause2.of((0, True)), Clause2.of((0, False))]
    assert not two_sat_satisfiable(1, c)
    assert two_sat_satisfiable(2, [Clause2.of((0, True), (1, True))])


def test_enum_2cnf_triangle_models():
    phi = [
        Clause2.of((0, True), (1, True)),
        Clause2.of((0, True), (2, True)),
        Clause2.of((1, True), (2, True)),
    ]
    got = {str(v) for v in enum_2cnf_models(phi, 3)}
    assert got == {"110", "011", "101", "111"}


def test_enum_2cnf_no_clauses():
    assert len({v.bits for v in enum_2cnf_models([], 2)}) == 4


def test_enum_2cnf_contradiction_empty():
    phi = [Clause2.of((0, True)), Clause2.of((0, False))]
    assert list(enum_2cnf_models(phi, 2)) == []


def test_enum_2cnf_matches_brute(rng):
    for _ in range(40):
        n = rng.randint(1, 6)
        phi = []
        for _ in range(rng.randint(0, 6)):
            a = rng.randrange(n)
            b = rng.randrange(n)
            lits = {(a, rng.random() < 0.5)}
            if b != a:
                lits.add((b, rng.random() < 0.5))
            phi.append(Clause2(frozenset(lits)))
        got = {v.bits for v in enum_2cnf_models(phi, n)}
        assert got == models_brute(phi, n)


def test_models_equal_majority_closure(rng):
    for _ in range(30):
        n = rng.randint(2, 6)
        m = rng.randint(1, 5)
        r = Relation(n, [rng.randrange(1 << n) for _ in range(m)])
        want = set(saturate_masks(n, r.rows, [OP_MAJ]))
        got = {v.bits for v in enum_2cnf_models(build_phi_d2(r), n)}
        assert got == want


def test_enum_dnf_single_positive_term():
    got = {str(v) for v in enum_dnf_models([DNFClause.of((0, True))], 2)}
    assert got == {"10", "11"}


def test_enum_dnf_mixed_terms():
    terms = [DNFClause.of((0, True), (1, True)), DNFClause.of((0, False))]
    got = {str(v) for v in enum_dnf_models(terms, 2)}
    assert got == {"11", "00", "01"}


def test_enum_dnf_no_terms_is_false():
    assert list(enum_dnf_models([], 3)) == []


def test_enum_dnf_matches_brute(rng):
    for _ in range(40):
        n = rng.randint(1, 6)
        terms = []
        for _ in range(rng.randint(1, 5)):
            size = rng.randint(1, n)
            vars_ = rng.sample(range(n), size)
            terms.append(frozenset((v, rng.random() < 0.6) for v in vars_))
        got = {v.bits for v in enum_dnf_models(terms, n)}
        assert got == dnf_models_brute(terms, n)


def test_mondnf_instance_single_term():
    rel = mondnf_to_e2_instance([DNFClause.of((0, True), (1, True))], 3)
    assert {str(v) for v in rel.vectors()} == {"110", "111"}


def test_mondnf_instance_full_term():
    rel = mondnf_to_e2_instance([DNFClause.of((0, True), (1, True), (2, True))], 3)
    assert {str(v) for v in rel.vectors()} == {"111"}
    assert set(saturate_masks(3, rel.rows, [OP_OR])) == {0b111}


def test_mondnf_union_closure_equals_models(rng):
    for _ in range(30):
        n = rng.randint(2, 7)
        terms = []
        for _ in range(rng.randint(1, 5)):
            size = rng.randint(1, min(3, n))
            terms.append(frozenset((v, True) for v in rng.sample(range(n), size)))
        rel = mondnf_to_e2_instance(terms, n)
        closure = set(saturate_masks(n, rel.rows, [OP_OR]))
        assert closure == dnf_models_brute(terms, n)


def test_mondnf_rejects_negative_and_empty_terms():
    with pytest.raises(ValueError):
        mondnf_to_e2_instance([DNFClause.of((0, False))], 2)
    with pytest.raises(ValueError):
        mondnf_to_e2_instance([DNFClause(frozenset())], 2)


def maximal_models(model_bits, n):
    out = set()
    for v in model_bits:
        if not any(w != v and w & v == v for w in model_bits):
            out.add(v)
    return out


def test_resolution_single_clause_unchanged():
    phi = [Clause2.of((0, True), (1, True))]
    assert clause_sets(eliminate_positive_by_resolution(phi)) == clause_sets(phi)


def test_resolution_tautology_dropped_preserves_maxima():
    phi = [Clause2.of((0, True), (1, True)), Clause2.of((0, False), (1, False))]
    out = eliminate_positive_by_resolution(phi)
    assert maximal_models(models_brute(out, 2), 2) == maximal_models(
        models_brute(phi, 2), 2
    )


def test_resolution_preserves_maximal_models(rng):
    for _ in range(60):
        n = rng.randint(1, 6)
        phi = []
        for _ in range(rng.randint(0, 7)):
            a, b = rng.randrange(n), rng.randrange(n)
            lits = {(a, rng.random() < 0.5)}
            if b != a:
                lits.add((b, rng.random() < 0.5))
            phi.append(Clause2(frozenset(lits)))
        out = eliminate_positive_by_resolution(phi)
        assert all(
            len({p for _v, p in c.literals}) <= 1
            or len({v for v, _p in c.literals}) == len(c.literals)
            for c in out
        )
        # every variable occurs with a single polarity
        pos = {v for c in out for v, p in c.literals if p}
        neg = {v for c in out for v, p in c.literals if not p}
        assert not (pos & neg)
        assert maximal_models(models_brute(out, n), n) == maximal_models(
            models_brute(phi, n), n
        )


def test_dimacs_roundtrip():
    clauses = [frozenset({(0, True), (2, False)}), frozenset({(1, True)})]
    text = format_dimacs("cnf", 3, clauses)
    kind, n, parsed = parse_dimacs(text)
    assert kind == "cnf" and n == 3
    assert set(parsed) == set(clauses)
