"""Tractable closure cases over domains larger than two: window-based
membership and enumeration when a near-unanimity operation is present,
depth-first closure traversal for associative binary operations, and the
exact-cover instance encoder showing where backtrack search must fail.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clones import OperationTable
from .core import FormatError
from .oracle import DEFAULT_BUDGET, SaturationBudget, saturate_tuples
from .streams import OpCounter, SolutionStream


@dataclass(frozen=True)
class DomainVector:
    domain_size: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.domain_size < 2:
            raise ValueError("domain size must be at least 2")
        if any(not 0 <= v < self.domain_size for v in self.values):
            raise ValueError("value out of domain")

    @property
    def width(self) -> int:
        return len(self.values)

    @classmethod
    def from_string(cls, text: str, domain_size: int) -> "DomainVector":
        return cls(domain_size, tuple(int(ch) for ch in text))

    def __str__(self) -> str:
        return "".join(str(v) for v in self.values)


class DomainRelation:
    """Ordered duplicate-free rows over a common finite domain."""

    def __init__(self, width: int, domain_size: int, rows):
        if width < 1:
            raise ValueError("width must be positive")
        if domain_size < 2:
            raise ValueError("domain size must be at least 2")
        self.width = width
        self.domain_size = domain_size
        seen = set()
        ordered = []
        for row in rows:
            t = tuple(row)
            if len(t) != width:
                raise ValueError("row width mismatch")
            if any(not 0 <= v < domain_size for v in t):
                raise ValueError("row value out of domain")
            if t not in seen:
                seen.add(t)
                ordered.append(t)
        self.rows: tuple[tuple[int, ...], ...] = tuple(ordered)

    @property
    def m(self) -> int:
        return len(self.rows)

    def vectors(self) -> tuple[DomainVector, ...]:
        return tuple(DomainVector(self.domain_size, row) for row in self.rows)

    def __repr__(self):
        return f"DomainRelation(n={self.width}, m={self.m}, d={self.domain_size})"


def detect_near_unanimity(op: OperationTable) -> bool:
    """f(x,..,x,y,x,..,x) = x for every placement of the single deviation."""
    if op.arity < 3:
        return False
    d, t = op.domain_size, op.arity
    for x in range(d):
        args = [x] * t
        if op.eval(args) != x:
            return False
        for pos in range(t):
            for y in range(d):
                args[pos] = y
                if op.eval(args) != x:
                    return False
            args[pos] = x
    return True


def _nu_window_arity(ops) -> int:
    """k such that some operation is a near-unanimity of arity k+1."""
    best = None
    for op in ops:
        if detect_near_unanimity(op):
            if best is None or op.arity < best:
                best = op.arity
    if best is None:
        raise ValueError("no near-unanimity operation in the given set")
    return best - 1


def _window_closure(r: DomainRelation, members, ops, budget) -> frozenset:
    rows = {tuple(row[i] for i in members) for row in r.rows}
    return frozenset(saturate_tuples(r.domain_size, rows, ops, budget=budget))


def member_nu(
    ops,
    r: DomainRelation,
    v: DomainVector,
    budget: SaturationBudget = DEFAULT_BUDGET,
) -> bool:
    """Window membership: v is in the closure iff every k-coordinate
    projection lies in the saturated window closure."""
    ops = list(ops)
    if v.width != r.width or v.domain_size != r.domain_size:
        raise ValueError("vector shape does not match the relation")
    if r.m == 0:
        return False
    k = _nu_window_arity(ops)
    n = r.width
    if k >= n:
        closed = set(saturate_tuples(r.domain_size, r.rows, ops, budget=budget))
        return v.values in closed
    for combo in itertools.combinations(range(n), k):
        closure = _window_closure(r, combo, ops, budget)
        if tuple(v.values[i] for i in combo) not in closure:
            return False
    return True


def enum_nu(
    ops,
    r: DomainRelation,
    counter: OpCounter | None = None,
    budget: SaturationBudget = DEFAULT_BUDGET,
) -> SolutionStream:
    """d-way backtrack search over coordinates; the extension test validates
    only the windows containing the newly assigned coordinate."""
    ops = list(ops)
    counter = counter or OpCounter()
    d, n = r.domain_size, r.width

    def gen():
        if r.m == 0:
            return
        k = _nu_window_arity(ops)
        if k >= n:
            for row in saturate_tuples(d, r.rows, ops, budget=budget):
                counter.tick()
                yield DomainVector(d, row)
            return
        prefix_sets = {
            l: _window_closure(r, tuple(range(l)), ops, budget)
            for l in range(1, k)
        }
        windows_by_last: dict[int, list] = {l: [] for l in range(n)}
        for combo in itertools.combinations(range(n), k):
            windows_by_last[combo[-1]].append(
                (combo, _window_closure(r, combo, ops, budget))
            )
        assignment = [0] * n

        def extend_ok(depth: int) -> bool:
            if depth < k:
                counter.tick()
                return tuple(assignment[:depth]) in prefix_sets[depth]
            for combo, cs in windows_by_last[depth - 1]:
                counter.tick()
                if tuple(assignment[i] for i in combo) not in cs:
                    return False
            return True

        def walk(depth: int):
            counter.tick()
            if depth == n:
                yield DomainVector(d, tuple(assignment))
                return
            for value in range(d):
                assignment[depth] = value
                if extend_ok(depth + 1):
                    yield from walk(depth + 1)

        yield from walk(0)

    return SolutionStream(gen(), counter, algorithm="nu-window-flashlight")


class _Trie:
    """Digit trie over fixed-width tuples; insert returns True when new."""

    __slots__ = ("root",)

    def __init__(self):
        self.root: dict = {}

    def insert(self, values) -> bool:
        node = self.root
        for v in values[:-1]:
            nxt = node.get(v)
            if nxt is None:
                nxt = {}
                node[v] = nxt
            node = nxt
        if values[-1] in node:
            return False
        node[values[-1]] = True
        return True


def is_associative(op: OperationTable) -> bool:
    if op.arity != 2:
        return False
    d = op.domain_size
    t = op.table

    def f(a, b):
        return t[a * d + b]

    return all(
        f(f(a, b), c) == f(a, f(b, c))
        for a in range(d)
        for b in range(d)
        for c in range(d)
    )


def enum_assoc(
    op: OperationTable,
    r: DomainRelation,
    counter: OpCounter | None = None,
) -> SolutionStream:
    """Depth-first traversal of the product graph v -> f(v, s): associativity
    makes every closure element reachable from a seed row.  The visited set is
    a trie, so the space grows with the number of solutions (flagged)."""
    if op.domain_size != r.domain_size:
        raise ValueError("operation domain does not match the relation")
    if not is_associative(op):
        raise ValueError("enum_assoc requires an associative binary operation")
    counter = counter or OpCounter()
    d = r.domain_size
    t = op.table

    def gen():
        trie = _Trie()
        stack = []
        for row in r.rows:
            counter.tick()
            if trie.insert(row):
                yield DomainVector(d, row)
                stack.append(row)
            while stack:
                v = stack.pop()
                for s in r.rows:
                    counter.tick()
                    w = tuple(t[a * d + b] for a, b in zip(v, s))
                    if trie.insert(w):
                        yield DomainVector(d, w)
                        stack.append(w)

    return SolutionStream(
        gen(),
        counter,
        algorithm="assoc-graph-dfs",
        notes=("solution-proportional-space",),
    )


def min_plus_op(domain_size: int = 3) -> OperationTable:
    """The capped addition min(x+y, d-1); associative and monotone."""
    d = domain_size
    return OperationTable.from_function(
        2, d, lambda x, y: min(x + y, d - 1), f"min(x+y,{d - 1})"
    )


def encode_exact3cover(universe: int, triples) -> tuple[DomainRelation, OperationTable, DomainVector]:
    """Characteristic vectors of the triples over domain {0,1,2} with capped
    addition: the all-ones vector is reachable exactly when an exact cover
    exists (covering an element twice saturates it to 2)."""
    rows = []
    for tri in triples:
        t = tuple(sorted(set(tri)))
        if len(t) != 3:
            raise ValueError(f"triple {tri!r} must have exactly three members")
        if any(not 0 <= v < universe for v in t):
            raise ValueError(f"triple {tri!r} out of the universe")
        rows.append(tuple(1 if i in t else 0 for i in range(universe)))
    rel = DomainRelation(universe, 3, rows)
    target = DomainVector(3, (1,) * universe)
    return rel, min_plus_op(3), target


def exact3cover_exists(universe: int, triples) -> bool:
    """Brute-force exact-cover search (test oracle)."""
    triples = [frozenset(t) for t in triples]

    def rec(covered: frozenset, start: int) -> bool:
        if len(covered) == universe:
            return True
        for i in range(start, len(triples)):
            t = triples[i]
            if not (t & covered):
                if rec(covered | t, i + 1):
                    return True
        return False

    return rec(frozenset(), 0)


# --- text format -----------------------------------------------------------------


def parse_domain_relation(text: str) -> DomainRelation:
    from .core import parse_domain_rows

    n, d, rows = parse_domain_rows(text)
    return DomainRelation(n, d, rows)


def format_domain_relation(r: DomainRelation) -> str:
    lines = [f"{r.width} {r.m} {r.domain_size}"]
    lines.extend("".join(str(v) for v in row) for row in r.rows)
    return "\n".join(lines) + "\n"
