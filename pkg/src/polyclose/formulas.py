"""2CNF and DNF machinery: majority-clone formulas, model enumeration,
positive-variable resolution, and the monotone-DNF instance generator.

Literals are (variable, positive) pairs with 0-based variables; clauses and
terms are stored as frozensets of literals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import BitVector, FormatError, Relation, mask_of
from .streams import OpCounter, SolutionStream

Literal = tuple[int, bool]


@dataclass(frozen=True)
class Clause2:
    """Disjunction of at most two literals; empty means unsatisfiable."""

    literals: frozenset

    def __post_init__(self):
        if len(self.literals) > 2:
            raise ValueError("2CNF clauses carry at most two literals")
        if len({v for v, _ in self.literals}) != len(self.literals):
            raise ValueError("duplicate variable within a clause")

    @classmethod
    def of(cls, *lits: Literal) -> "Clause2":
        return cls(frozenset(lits))


@dataclass(frozen=True)
class DNFClause:
    """Conjunction term of a DNF."""

    literals: frozenset

    def __post_init__(self):
        if len({v for v, _ in self.literals}) != len(self.literals):
            raise ValueError("complementary or duplicate literal within a term")

    @classmethod
    def of(cls, *lits: Literal) -> "DNFClause":
        return cls(frozenset(lits))

    def is_positive(self) -> bool:
        return all(pos for _, pos in self.literals)


def build_phi_d2(r: Relation) -> list[Clause2]:
    """One clause per missing value pair of a coordinate pair: models of the
    conjunction are exactly the majority closure."""
    n = r.width
    clauses = []
    for i in range(n):
        for j in range(i + 1, n):
            present = {
                (((row >> i) & 1), ((row >> j) & 1)) for row in r.rows
            }
            for a, b in itertools.product((0, 1), repeat=2):
                if (a, b) not in present:
                    clauses.append(
                        Clause2.of((i, a == 0), (j, b == 0))
                    )
    return clauses


# --- 2CNF satisfiability via implication-graph SCCs --------------------------


def _tarjan_sccs(n_nodes: int, adj: list[list[int]]) -> list[int]:
    """Iterative Tarjan; returns the SCC id of every node."""
    index = [-1] * n_nodes
    low = [0] * n_nodes
    comp = [-1] * n_nodes
    on_stack = [False] * n_nodes
    stack: list[int] = []
    counter = 0
    comp_count = 0
    for root in range(n_nodes):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            node, ei = work[-1]
            if ei == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            advanced = False
            while ei < len(adj[node]):
                succ = adj[node][ei]
                ei += 1
                if index[succ] == -1:
                    work[-1] = (node, ei)
                    work.append((succ, 0))
                    advanced = True
                    break
                if on_stack[succ]:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = comp_count
                    if w == node:
                        break
                comp_count += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return comp


def _lit_node(var: int, positive: bool) -> int:
    return 2 * var + (1 if positive else 0)


def two_sat_satisfiable(
    n: int,
    clauses,
    assignment=None,
    counter: OpCounter | None = None,
) -> bool:
    """SCC test for a 2CNF plus optional forced values (None entries free)."""
    adj: list[list[int]] = [[] for _ in range(2 * n)]

    def imply(a: Literal, b: Literal):
        adj[_lit_node(a[0], not a[1])].append(_lit_node(*b))

    for cl in clauses:
        lits = list(cl.literals)
        if not lits:
            return False
        if len(lits) == 1:
            imply(lits[0], lits[0])
        else:
            a, b = lits
            imply(a, b)
            imply(b, a)
    if assignment is not None:
        for var, val in enumerate(assignment):
            if val is not None:
                lit = (var, bool(val))
                imply(lit, lit)
    if counter is not None:
        counter.tick(n + sum(len(a) for a in adj))
    comp = _tarjan_sccs(2 * n, adj)
    return all(comp[2 * v] != comp[2 * v + 1] for v in range(n))


def enum_2cnf_models(
    clauses, n: int, counter: OpCounter | None = None
) -> SolutionStream:
    """Backtrack search over variables; each node is validated by the SCC
    satisfiability test of the formula plus the forced prefix."""
    counter = counter or OpCounter()
    clauses = list(clauses)

    def gen():
        if not two_sat_satisfiable(n, clauses, None, counter):
            return
        assignment: list[int | None] = [None] * n
        def walk(depth: int):
            if depth == n:
                bits = 0
                for i, val in enumerate(assignment):
                    if val:
                        bits |= 1 << i
                yield BitVector(n, bits)
                return
            for b in (0, 1):
                assignment[depth] = b
                if two_sat_satisfiable(n, clauses, assignment, counter):
                    yield from walk(depth + 1)
                assignment[depth] = None

        yield from walk(0)

    return SolutionStream(gen(), counter, algorithm="2cnf-flashlight")


def enum_dnf_models(
    terms, n: int, counter: OpCounter | None = None
) -> SolutionStream:
    """Backtrack search with per-term contradiction counts: assigning a
    variable only touches the terms it occurs in, so a branch costs O(mn)."""
    counter = counter or OpCounter()
    terms = [t.literals if isinstance(t, DNFClause) else frozenset(t) for t in terms]

    def gen():
        m = len(terms)
        if m == 0:
            return
        occ: list[tuple[list[int], list[int]]] = [([], []) for _ in range(n)]
        for ti, lits in enumerate(terms):
            for var, pos in lits:
                # term dies when var is assigned the complement of pos
                occ[var][0 if pos else 1].append(ti)
        broken = [0] * m
        alive = m

        def assign(var: int, value: int) -> int:
            nonlocal alive
            died = 0
            for ti in occ[var][value]:
                counter.tick()
                broken[ti] += 1
                if broken[ti] == 1:
                    alive -= 1
                    died += 1
            return died

        def unassign(var: int, value: int):
            nonlocal alive
            for ti in occ[var][value]:
                broken[ti] -= 1
                if broken[ti] == 0:
                    alive += 1

        bits = 0

        def walk(depth: int):
            nonlocal bits
            if depth == n:
                counter.tick()
                yield BitVector(n, bits)
                return
            for b in (0, 1):
                assign(depth, b)
                if alive > 0:
                    if b:
                        bits |= 1 << depth
                    yield from walk(depth + 1)
                    bits &= ~(1 << depth)
                unassign(depth, b)

        yield from walk(0)

    return SolutionStream(gen(), counter, algorithm="dnf-flashlight")


def mondnf_to_e2_instance(terms, n: int) -> Relation:
    """Vectors v^{i,j}: the support of term i with coordinate j forced to 1.

    The union closure of the result is exactly the model set of the monotone
    DNF, so intersection-closure enumeration solves monotone DNF models.
    """
    rows = []
    for t in terms:
        lits = t.literals if isinstance(t, DNFClause) else frozenset(t)
        if not lits:
            raise ValueError("terms must be nonempty")
        if any(not pos for _, pos in lits):
            raise ValueError("terms must be monotone (positive literals only)")
        base = 0
        for var, _ in lits:
            if var >= n:
                raise ValueError("literal variable out of range")
            base |= 1 << var
        for j in range(n):
            rows.append(base | (1 << j))
    return Relation(n, rows)


def eliminate_positive_by_resolution(clauses) -> list[Clause2]:
    """Remove every positive occurrence of two-polarity variables by
    resolution, keeping the negative clauses; preserves maximal models.

    Tautologies, duplicates, and subsumed clauses are dropped, keeping the
    clause count quadratic.  An empty clause (unsatisfiable input) survives to
    the output.
    """
    cls: set[frozenset] = set()
    for c in clauses:
        lits = c.literals if isinstance(c, Clause2) else frozenset(c)
        if len({v for v, _ in lits}) < len(lits):
            continue  # tautology x or not x
        cls.add(frozenset(lits))

    def polarity_map():
        pos, neg = set(), set()
        for c in cls:
            for var, p in c:
                (pos if p else neg).add(var)
        return pos, neg

    while True:
        pos, neg = polarity_map()
        both = pos & neg
        if not both:
            break
        x = min(both)
        with_pos = {c for c in cls if (x, True) in c}
        with_neg = {c for c in cls if (x, False) in c}
        resolvents = set()
        for a in with_pos:
            rest_a = a - {(x, True)}
            for b in with_neg:
                res = rest_a | (b - {(x, False)})
                if len({v for v, _ in res}) < len(res):
                    continue  # tautology
                resolvents.add(res)
        cls = (cls - with_pos) | resolvents

    # subsumption: keep minimal clauses only
    out = []
    ordered = sorted(cls, key=len)
    kept: list[frozenset] = []
    for c in ordered:
        if any(k <= c for k in kept):
            continue
        kept.append(c)
    return [Clause2(c) for c in kept]


def models_brute(clauses, n: int) -> set[int]:
    """All satisfying assignments by exhaustive check (test oracle)."""
    out = set()
    cl = [c.literals if isinstance(c, Clause2) else frozenset(c) for c in clauses]
    for bits in range(1 << n):
        ok = True
        for c in cl:
            if not any(((bits >> v) & 1) == (1 if pos else 0) for v, pos in c):
                ok = False
                break
        if ok:
            out.add(bits)
    return out


def dnf_models_brute(terms, n: int) -> set[int]:
    out = set()
    ts = [t.literals if isinstance(t, DNFClause) else frozenset(t) for t in terms]
    for bits in range(1 << n):
        for t in ts:
            if all(((bits >> v) & 1) == (1 if pos else 0) for v, pos in t):
                out.add(bits)
                break
    return out


# --- DIMACS-like text format --------------------------------------------------


def parse_dimacs(text: str, expect: str | None = None):
    """Parse 'p cnf|dnf n m' followed by zero-terminated clause lines.

    Returns (kind, n, clause list of literal frozensets).
    """
    kind = None
    n = m = 0
    clauses: list[frozenset] = []
    current: list[Literal] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("c", "#")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] not in ("cnf", "dnf"):
                raise FormatError("expected 'p cnf|dnf <vars> <clauses>'", lineno)
            kind, n, m = parts[1], int(parts[2]), int(parts[3])
            continue
        if kind is None:
            raise FormatError("clause before 'p' header", lineno)
        for tok in line.split():
            val = int(tok)
            if val == 0:
                clauses.append(frozenset(current))
                current = []
            else:
                var = abs(val) - 1
                if var >= n:
                    raise FormatError(f"variable {abs(val)} out of range", lineno)
                current.append((var, val > 0))
    if current:
        clauses.append(frozenset(current))
    if kind is None:
        raise FormatError("missing 'p' header")
    if expect is not None and kind != expect:
        raise FormatError(f"expected a {expect} file, found {kind}")
    if len(clauses) != m:
        raise FormatError(f"header declared {m} clauses, found {len(clauses)}")
    return kind, n, clauses


def format_dimacs(kind: str, n: int, clauses) -> str:
    lines = [f"p {kind} {n} {len(clauses)}"]
    for c in clauses:
        lits = c.literals if isinstance(c, (Clause2, DNFClause)) else c
        toks = sorted((v + 1) if pos else -(v + 1) for v, pos in lits)
        lines.append(" ".join(str(t) for t in toks) + " 0")
    return "\n".join(lines) + "\n"
