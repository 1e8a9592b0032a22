"""Minimal and maximal closure elements with the zero and one vectors excluded.

Atom-structured clones read their extrema off the atom lattice directly; the
majority clones go through the 2CNF route (resolution, then maximal
independent sets of the clause graph); the threshold hierarchies correspond
to maximal independent sets of the never-covered-window hypergraph; the
GF(2) cases are related to minimal-support span vectors and otherwise brute
forced under a budget.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clones import CloneId, clone_base
from .core import (
    BitVector,
    FormatError,
    IndexSet,
    Relation,
    embed_bits,
    mask_of,
    project_bits,
)
from .formulas import (
    Clause2,
    eliminate_positive_by_resolution,
    two_sat_satisfiable,
)
from .membership import atoms_bf, atoms_m2, gf2_echelon, gf2_reduce
from .oracle import DEFAULT_BUDGET, BudgetExhausted, SaturationBudget, saturate_masks
from .streams import OpCounter, SolutionStream


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: vertex count plus sorted edge pairs."""

    vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ValueError("self-loops are not allowed")
            if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                raise ValueError("edge endpoint out of range")
        if len({tuple(sorted(e)) for e in self.edges}) != len(self.edges):
            raise ValueError("duplicate edges")

    @classmethod
    def of(cls, vertices: int, edges) -> "Graph":
        return cls(vertices, tuple(sorted(tuple(sorted(e)) for e in set(map(tuple, map(sorted, edges))))))

    def adjacency_masks(self) -> list[int]:
        adj = [0] * self.vertices
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj


@dataclass(frozen=True)
class Hypergraph:
    """Vertex count plus duplicate-free nonempty edges (index sets)."""

    vertices: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            if not e:
                raise ValueError("empty hyperedge")
            if any(not 0 <= v < self.vertices for v in e):
                raise ValueError("vertex out of range")
            if tuple(sorted(set(e))) != e:
                raise ValueError("edges must be sorted duplicate-free tuples")
            if e in seen:
                raise ValueError("duplicate hyperedge")
            seen.add(e)

    @classmethod
    def of(cls, vertices: int, edges) -> "Hypergraph":
        return cls(vertices, tuple(sorted({tuple(sorted(set(e))) for e in edges})))

    @property
    def dimension(self) -> int:
        return max((len(e) for e in self.edges), default=0)

    def edge_masks(self) -> list[int]:
        out = []
        for e in self.edges:
            m = 0
            for v in e:
                m |= 1 << v
            out.append(m)
        return out


# --- independent-set enumeration -----------------------------------------------


def graph_mis_enum(g: Graph, counter: OpCounter | None = None) -> SolutionStream:
    """All inclusion-maximal independent sets, polynomial delay.

    Vertex-incremental scheme: a maximal set of the first j vertices either
    stays maximal, absorbs vertex j when unconstrained, or spawns the repaired
    set (S minus N(j)) plus j — accepted only from its canonical parent (the
    greedy completion), which makes the tree duplicate-free.
    """
    counter = counter or OpCounter()
    n = g.vertices
    adj = g.adjacency_masks()

    def greedy_complete(base: int, j: int) -> int:
        s = base
        for v in range(j):
            counter.tick()
            if not (s >> v) & 1 and adj[v] & s == 0:
                s |= 1 << v
        return s

    def maximal_in_prefix(s: int, j: int) -> bool:
        for v in range(j):
            counter.tick()
            if not (s >> v) & 1 and adj[v] & s == 0:
                return False
        return True

    def rec(j: int, s: int):
        counter.tick()
        if j == n:
            yield BitVector(n, s)
            return
        below = mask_of(j)
        neigh = adj[j] & below
        if s & neigh == 0:
            yield from rec(j + 1, s | (1 << j))
            return
        yield from rec(j + 1, s)
        t = (s & ~neigh) | (1 << j)
        if maximal_in_prefix(t, j + 1) and greedy_complete(t & ~(1 << j), j) == s:
            yield from rec(j + 1, t)

    def gen():
        if n == 0:
            yield BitVector(0, 0)
            return
        yield from rec(1, 1)

    return SolutionStream(gen(), counter, algorithm="graph-mis")


def hypergraph_mis_enum(h: Hypergraph, counter: OpCounter | None = None) -> SolutionStream:
    """All inclusion-maximal independent sets of a hypergraph.

    Correctness-first backtracking with a maximality certificate per leaf; no
    polynomial-delay claim is made (flagged on the stream).
    """
    counter = counter or OpCounter()
    n = h.vertices
    edges = h.edge_masks()

    def independent(s: int) -> bool:
        for e in edges:
            counter.tick()
            if e & s == e:
                return False
        return True

    def maximal(s: int) -> bool:
        for v in range(n):
            if (s >> v) & 1:
                continue
            cand = s | (1 << v)
            if independent(cand):
                return False
        return True

    def rec(v: int, s: int):
        counter.tick()
        if v == n:
            if maximal(s):
                yield BitVector(n, s)
            return
        cand = s | (1 << v)
        if independent(cand):
            yield from rec(v + 1, cand)
        yield from rec(v + 1, s)

    return SolutionStream(
        rec(0, 0),
        counter,
        algorithm="hypergraph-mis-backtracking",
        polynomial_delay=False,
        notes=("non-polynomial-delay",),
    )


# --- filters ---------------------------------------------------------------------


def _max_filter(cands) -> list[int]:
    cands = sorted(set(cands), key=lambda x: -bin(x).count("1"))
    out: list[int] = []
    for c in cands:
        if not any(c & k == c and c != k for k in out):
            out.append(c)
    return out


def _min_filter(cands) -> list[int]:
    cands = sorted(set(cands), key=lambda x: bin(x).count("1"))
    out: list[int] = []
    for c in cands:
        if not any(c & k == k and c != k for k in out):
            out.append(c)
    return out


def _strip_trivial(cands, width: int) -> list[int]:
    full = mask_of(width)
    return [c for c in cands if c != 0 and c != full]


# --- atom-structured clones --------------------------------------------------------


def _bf_family_structure(clone: CloneId, r: Relation) -> tuple[int, list[int]]:
    """(forced-ones mask, disjoint atom masks) describing the closure as
    forced-part OR union-of-atom-subsets."""
    full_rows = mask_of(r.m)
    drop0 = drop1 = 0
    if clone.tag in ("R",):
        for i, col in enumerate(r.columns):
            if col == 0:
                drop0 |= 1 << i
            elif col == full_rows:
                drop1 |= 1 << i
    elif clone.tag == "R0":
        for i, col in enumerate(r.columns):
            if col == 0:
                drop0 |= 1 << i
    keep = [i for i in range(r.width) if not ((drop0 | drop1) >> i) & 1]
    if not keep:
        return drop1, []
    sub = Relation(len(keep), (project_bits(row, keep) for row in r.rows))
    atoms = []
    seen = set()
    for a in atoms_bf(sub):
        if a and a not in seen:
            seen.add(a)
            atoms.append(embed_bits(a, keep))
    return drop1, atoms


def _atom_family_extrema(fixed1: int, atoms: list[int], width: int, side: str) -> list[int]:
    full = mask_of(width)
    if side == "max":
        top = fixed1
        for a in atoms:
            top |= a
        if top == full:
            return _strip_trivial([full ^ a for a in atoms], width)
        return _strip_trivial([top], width)
    if fixed1:
        return _strip_trivial([fixed1], width)
    return _strip_trivial(list(atoms), width)


def _m2_structure(r: Relation) -> tuple[int, list[int | None], int]:
    atoms = atoms_m2(r)
    floor = r.and_of_rows()
    top = floor
    for a in atoms:
        if a is not None:
            top |= a
    return floor, atoms, top


def _m2_extrema(r: Relation, side: str) -> list[int]:
    floor, atoms, top = _m2_structure(r)
    full = mask_of(r.width)
    if side == "min":
        if floor:
            return _strip_trivial([floor], r.width)
        cands = [a for a in atoms if a]
        return _strip_trivial(_min_filter(cands), r.width)
    cands = []
    for i in range(r.width):
        if (floor >> i) & 1:
            continue
        u = floor
        for a in atoms:
            if a is not None and not (a >> i) & 1:
                u |= a
        cands.append(u)
    return _strip_trivial(_max_filter(cands), r.width)


def _s10_extrema(r: Relation, side: str) -> list[int]:
    floor, atoms, top = _m2_structure(r)
    full = mask_of(r.width)
    if side == "min":
        cands = []
        for s in r.rows:
            fs = floor & s
            if fs:
                cands.append(fs)
            else:
                cands.extend(a & s for a in atoms if a is not None and a & s)
        return _strip_trivial(_min_filter(cands), r.width)
    cands = []
    for s in r.rows:
        ts = top & s
        if ts != full:
            cands.append(ts)
        else:
            for i in range(r.width):
                if (floor >> i) & 1:
                    continue
                u = floor
                for a in atoms:
                    if a is not None and not (a >> i) & 1:
                        u |= a
                cands.append(u & s)
    return _strip_trivial(_max_filter(cands), r.width)


def _s12_extrema(r: Relation, side: str) -> list[int]:
    full_rows = mask_of(r.m)
    imask = 0
    for i, col in enumerate(r.columns):
        if col == full_rows:
            imask |= 1 << i
    rest = mask_of(r.width) ^ imask
    batoms = atoms_bf(r)
    if side == "min":
        if imask:
            return _strip_trivial([imask], r.width)
        cands = []
        for s in r.rows:
            support = s & rest
            cands.extend(
                a & support for a in batoms if a & support
            )
        return _strip_trivial(_min_filter(cands), r.width)
    full = mask_of(r.width)
    cands = []
    for s in r.rows:
        if s != full:
            cands.append(s)
        else:
            seen = set()
            for i in range(r.width):
                if not (rest >> i) & 1:
                    continue
                a = batoms[i] & rest
                if a and a not in seen:
                    seen.add(a)
                    cands.append(full ^ a)
    return _strip_trivial(_max_filter(cands), r.width)


def max_min_trivial(clone: CloneId, r: Relation, side: str) -> list[BitVector]:
    """Closed-form extrema for the atom-structured clones."""
    if r.m == 0:
        return []
    side = side.lower()
    if side not in ("min", "max"):
        raise ValueError("side must be 'min' or 'max'")
    tag = clone.tag
    full = mask_of(r.width)
    if tag == "E2":
        if side == "max":
            cands = _max_filter(_strip_trivial(r.rows, r.width))
        else:
            cands = _strip_trivial(
                _min_filter([a for a in atoms_m2(r) if a]), r.width
            )
        return [BitVector(r.width, c) for c in cands]
    if tag == "M2":
        return [BitVector(r.width, c) for c in _m2_extrema(r, side)]
    if tag in ("BF", "R", "R0"):
        fixed1, atoms = _bf_family_structure(clone, r)
        return [
            BitVector(r.width, c)
            for c in _atom_family_extrema(fixed1, atoms, r.width, side)
        ]
    if tag in ("S10", "S10K"):
        if side == "max" and tag == "S10K":
            raise ValueError("threshold-hierarchy maxima are not closed-form")
        return [BitVector(r.width, c) for c in _s10_extrema(r, side)]
    if tag in ("S12", "S12K"):
        if side == "max" and tag == "S12K":
            raise ValueError("threshold-hierarchy maxima are not closed-form")
        return [BitVector(r.width, c) for c in _s12_extrema(r, side)]
    raise ValueError(f"no closed-form extrema for clone {clone} side {side}")


# --- majority clones via 2CNF + graph MIS ---------------------------------------


def _pairwise_phi(clone: CloneId, r: Relation) -> list[Clause2]:
    """Clause per missing pair value of the clone's pairwise closures."""
    base = clone_base(clone)
    n = r.width
    clauses = []
    for i in range(n):
        for j in range(i + 1, n):
            proj = {((row >> i) & 1) | (((row >> j) & 1) << 1) for row in r.rows}
            closed = set(saturate_masks(2, proj, base))
            for a, b in itertools.product((0, 1), repeat=2):
                if (a | (b << 1)) not in closed:
                    clauses.append(Clause2.of((i, a == 0), (j, b == 0)))
    return clauses


def _negate_clauses(clauses) -> list[Clause2]:
    return [
        Clause2(frozenset((v, not pos) for v, pos in c.literals)) for c in clauses
    ]


def _max_models(clauses, n: int, counter: OpCounter):
    """Maximal models of a 2CNF: resolution makes every variable single
    polarity, positive and untouched variables go to 1, negative units to 0,
    and the antimonotone residue is a graph MIS enumeration."""
    resolved = eliminate_positive_by_resolution(clauses)
    if any(not c.literals for c in resolved):
        return
    forced0 = set()
    for c in resolved:
        if len(c.literals) == 1:
            (var, pos), = c.literals
            if not pos:
                forced0.add(var)
    residue = []
    for c in resolved:
        lits = c.literals
        if len(lits) == 2 and all(not pos for _v, pos in lits):
            vs = sorted(v for v, _ in lits)
            if vs[0] not in forced0 and vs[1] not in forced0:
                residue.append((vs[0], vs[1]))
    neg_vars = {v for e in residue for v in e} | forced0
    base_ones = mask_of(n)
    for v in forced0:
        base_ones &= ~(1 << v)
    free_part = base_ones
    for v in neg_vars:
        free_part &= ~(1 << v)
    verts = sorted({v for e in residue for v in e})
    pos_of = {v: idx for idx, v in enumerate(verts)}
    g = Graph.of(len(verts), [(pos_of[u], pos_of[v]) for u, v in residue])
    for mis in graph_mis_enum(g, counter):
        bits = free_part
        for idx, v in enumerate(verts):
            if mis.get(idx):
                bits |= 1 << v
        yield bits


def _dominated_in_closure(clauses, n: int, v: int, counter: OpCounter) -> bool:
    """Is some closure element strictly above v and different from the all-ones
    vector?  Checked by 2-SAT queries fixing one raised and one zero
    coordinate."""
    zeros = [i for i in range(n) if not (v >> i) & 1]
    for k in zeros:
        for j in zeros:
            if j == k:
                continue
            assignment: list[int | None] = [None] * n
            for i in range(n):
                if (v >> i) & 1:
                    assignment[i] = 1
            assignment[k] = 1
            assignment[j] = 0
            if two_sat_satisfiable(n, clauses, assignment, counter):
                return True
    return False


def max_models_maj(
    clone: CloneId, r: Relation, side: str, counter: OpCounter | None = None
) -> SolutionStream:
    """Extremal closure elements for the majority clones, zero/one excluded."""
    if clone.tag not in ("D2", "D1", "M2", "BF", "R", "R0"):
        raise ValueError("max_models_maj needs a clone containing the majority op")
    counter = counter or OpCounter()
    n = r.width
    side = side.lower()

    def gen():
        if r.m == 0 or n == 0:
            return
        if n == 1:
            return  # only 0/1 exist at width 1, both excluded
        clauses = _pairwise_phi(clone, r)
        if side == "min":
            work = _negate_clauses(clauses)
            post = lambda bits: bits ^ mask_of(n)
        else:
            work = clauses
            post = lambda bits: bits
        full = mask_of(n)
        ones_in = two_sat_satisfiable(
            n, work, [1] * n, counter
        )
        if not ones_in:
            for bits in _max_models(work, n, counter):
                out = post(bits)
                if out != 0 and out != full:
                    yield BitVector(n, out)
            return
        emitted_top = False
        for i in range(n):
            extra = list(work) + [Clause2.of((i, False))]
            if not two_sat_satisfiable(n, extra, None, counter):
                continue
            for bits in _max_models(extra, n, counter):
                zeros = [j for j in range(n) if not (bits >> j) & 1]
                if not zeros or min(zeros) != i:
                    continue
                if _dominated_in_closure(work, n, bits, counter):
                    continue
                out = post(bits)
                if out != 0 and out != full:
                    yield BitVector(n, out)

    return SolutionStream(gen(), counter, algorithm=f"maj-2cnf-mis-{side}")


# --- hypergraph correspondence -----------------------------------------------------


def closure_to_hypergraph(r: Relation, k: int) -> Hypergraph:
    """Edges are the coordinate sets of size at most k never simultaneously 1
    in any row."""
    if k > r.width:
        raise ValueError("k exceeds the relation width")
    edges = []
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(r.width), size):
            m = 0
            for i in combo:
                m |= 1 << i
            if not any(row & m == m for row in r.rows):
                edges.append(combo)
    return Hypergraph.of(r.width, edges)


def hypergraph_to_closure(h: Hypergraph, k: int | None = None) -> Relation:
    """Characteristic vectors of the non-edges of size k plus the unit
    vectors: the threshold-hierarchy closure of the result is exactly the
    independent sets of the hypergraph.  Requires a k-regular hypergraph.
    """
    if k is None:
        k = h.dimension
    if any(len(e) != k for e in h.edges):
        raise ValueError("hypergraph must be k-regular (all edges of size k)")
    n = h.vertices
    edge_set = set(h.edges)
    rows = []
    for combo in itertools.combinations(range(n), k):
        if combo not in edge_set:
            m = 0
            for i in combo:
                m |= 1 << i
            rows.append(m)
    rows.extend(1 << i for i in range(n))
    return Relation(n, rows)


def max_kwise_via_hypergraph(
    clone: CloneId, r: Relation, counter: OpCounter | None = None
) -> SolutionStream:
    """Maximal elements of the threshold-hierarchy closures (k >= 4) as the
    maximal independent sets of the never-covered-window hypergraph; equal
    columns are merged and forced-one columns projected out first."""
    if clone.tag not in ("S10K", "S12K") or clone.k < 4:
        raise ValueError("hypergraph route applies to S10K/S12K with k >= 4")
    counter = counter or OpCounter()
    k = clone.k
    n = r.width

    def gen():
        if r.m == 0:
            return
        full_rows = mask_of(r.m)
        # project out forced-one columns, merge equal columns
        ones_cols = [i for i, col in enumerate(r.columns) if col == full_rows]
        keep = [i for i in range(n) if i not in set(ones_cols)]
        sub = Relation(len(keep), (project_bits(row, keep) for row in r.rows))
        classes: dict[int, list[int]] = {}
        for p, col in enumerate(sub.columns):
            classes.setdefault(col, []).append(p)
        reps = sorted(c[0] for c in classes.values())
        merged = Relation(len(reps), (project_bits(row, reps) for row in sub.rows))
        rep_classes = [classes[sub.columns[rep]] for rep in reps]
        imask = 0
        for i in ones_cols:
            imask |= 1 << i
        full = mask_of(n)
        if merged.width < k:
            # not enough distinct coordinates for a window: brute force,
            # excluding 0/1 at the original width before the maximality filter
            closed = saturate_masks(merged.width, merged.rows, clone_base(clone))
            expanded = [_expand_bits(c, rep_classes, keep, imask) for c in closed]
            for bits in sorted(_max_filter(_strip_trivial(expanded, n))):
                yield BitVector(n, bits)
            return
        hg = closure_to_hypergraph(merged, k)
        if not hg.edges:
            # The 1 vector is in the closure, so the independent-set maxima
            # collapse to it; the maximal non-1 elements are clone-specific.
            # S12K: every vector qualifies, so clear one coordinate class.
            # S10K: a zero at j forces zeros at every coordinate with no
            # (1,0)-witness row against j; maximal elements complement the
            # closures of single coordinates under that forcing.
            w = merged.width
            if clone.tag == "S12K":
                cands = [mask_of(w) ^ (1 << p) for p in range(w)]
            else:
                forced = []
                for j in range(w):
                    witness = 0
                    for row in merged.rows:
                        if not (row >> j) & 1:
                            witness |= row
                    forced.append(mask_of(w) ^ witness)
                cands = []
                for j in range(w):
                    z = 1 << j
                    while True:
                        grown = z
                        for p in range(w):
                            if (z >> p) & 1:
                                grown |= forced[p]
                        if grown == z:
                            break
                        z = grown
                    cands.append(mask_of(w) ^ z)
                cands = _max_filter(cands)
            for c in sorted(cands):
                bits = _expand_bits(c, rep_classes, keep, imask)
                if bits != 0:
                    yield BitVector(n, bits)
            return
        for mis in hypergraph_mis_enum(hg, counter):
            bits = _expand_bits(mis.bits, rep_classes, keep, imask)
            if bits != 0 and bits != full:
                yield BitVector(n, bits)

    return SolutionStream(
        gen(),
        counter,
        algorithm="kwise-hypergraph-mis",
        polynomial_delay=False,
        notes=("non-polynomial-delay",),
    )


def _expand_bits(bits: int, rep_classes, keep, imask: int) -> int:
    out = imask
    for p, members in enumerate(rep_classes):
        if (bits >> p) & 1:
            for q in members:
                out |= 1 << keep[q]
    return out


# --- GF(2) extrema -------------------------------------------------------------------


def to_binary_matroid(r: Relation) -> list[int]:
    """Rows of a matrix whose kernel is the span of r (a basis of the
    orthogonal complement), suitable for matroid tooling."""
    if r.m == 0:
        raise ValueError("matroid view needs a nonempty relation")
    n = r.width
    basis = gf2_echelon(r.rows)
    # solve basis . y = 0: free coordinates parameterize the complement
    pivots = {b.bit_length() - 1 for b in basis}
    rows = []
    for free in range(n):
        if free in pivots:
            continue
        y = 1 << free
        for b in basis:
            if (b >> free) & 1:
                # flip the pivot coordinate so that b . y = 0
                y ^= 1 << (b.bit_length() - 1)
        rows.append(y)
    return rows


def _span_elements(r: Relation, budget: SaturationBudget) -> list[int]:
    basis = gf2_echelon(r.rows)
    if (1 << len(basis)) > budget.max_elements:
        raise BudgetExhausted("span exceeds the element budget", [])
    out = []
    cur = 0
    out.append(0)
    for i in range(1, 1 << len(basis)):
        cur ^= basis[(i & -i).bit_length() - 1]
        out.append(cur)
    return out


def min_l0(r: Relation, budget: SaturationBudget = DEFAULT_BUDGET) -> list[BitVector]:
    """Minimal-support nonzero span vectors (the circuit supports of the
    associated binary matroid), by bounded span enumeration."""
    if r.m == 0:
        return []
    span = [x for x in _span_elements(r, budget) if x]
    picked = [c for c in _min_filter(span) if c != mask_of(r.width)]
    return [BitVector(r.width, c) for c in picked]


def _linear_extrema(
    r: Relation, affine: bool, side: str, budget: SaturationBudget
) -> list[BitVector]:
    if r.m == 0:
        return []
    if affine:
        v0 = r.rows[0]
        dirs = gf2_echelon([x ^ v0 for x in r.rows[1:]])
        if (1 << len(dirs)) > budget.max_elements:
            raise BudgetExhausted("affine space exceeds the element budget", [])
        elems = []
        cur = v0
        elems.append(cur)
        for i in range(1, 1 << len(dirs)):
            cur ^= dirs[(i & -i).bit_length() - 1]
            elems.append(cur)
    else:
        elems = _span_elements(r, budget)
    cands = _strip_trivial(elems, r.width)
    picked = _min_filter(cands) if side == "min" else _max_filter(cands)
    return [BitVector(r.width, c) for c in picked]


def min_l2(r: Relation, budget: SaturationBudget = DEFAULT_BUDGET) -> list[BitVector]:
    return _linear_extrema(r, True, "min", budget)


def max_l0(r: Relation, budget: SaturationBudget = DEFAULT_BUDGET) -> list[BitVector]:
    return _linear_extrema(r, False, "max", budget)


def max_l2(r: Relation, budget: SaturationBudget = DEFAULT_BUDGET) -> list[BitVector]:
    return _linear_extrema(r, True, "max", budget)


# --- dispatcher ------------------------------------------------------------------------


def extremal_stream(
    clone: CloneId,
    r: Relation,
    side: str,
    budget: SaturationBudget = DEFAULT_BUDGET,
    counter: OpCounter | None = None,
) -> SolutionStream:
    """Stream the minimal/maximal closure elements (0 and 1 excluded)."""
    counter = counter or OpCounter()
    side = side.lower()
    if side not in ("min", "max"):
        raise ValueError("side must be 'min' or 'max'")
    tag = clone.tag

    def from_list(items, algorithm):
        gen = (v for v in items)
        return SolutionStream(gen, counter, algorithm=algorithm)

    if tag in ("E2", "M2", "BF", "R", "R0", "S10", "S12"):
        return from_list(max_min_trivial(clone, r, side), f"{tag.lower()}-closed-form")
    if tag in ("D2", "D1"):
        return max_models_maj(clone, r, side, counter)
    if tag in ("L0", "L2"):
        affine = tag == "L2"
        if side == "min" and not affine:
            items = min_l0(r, budget)
        else:
            items = _linear_extrema(r, affine, side, budget)
        stream = from_list(items, f"{tag.lower()}-span-brute")
        stream.polynomial_delay = False
        stream.notes = ("non-polynomial-delay",)
        return stream
    if tag in ("S10K", "S12K"):
        if side == "min":
            return from_list(max_min_trivial(clone, r, side), "hierarchy-atoms")
        if clone.k >= 4:
            return max_kwise_via_hypergraph(clone, r, counter)
        elems = saturate_masks(r.width, r.rows, clone_base(clone), budget=budget)
        cands = _max_filter(_strip_trivial(elems, r.width))
        stream = from_list([BitVector(r.width, c) for c in cands], "brute-filter")
        stream.polynomial_delay = False
        stream.notes = ("non-polynomial-delay",)
        return stream
    raise ValueError(f"no extremal routine for clone {clone}")


# --- text formats ------------------------------------------------------------------------


def parse_hypergraph(text: str) -> Hypergraph:
    """'n e' header then one edge per line as 1-based vertex indices."""
    lines = [
        (no, ln.strip())
        for no, ln in enumerate(text.splitlines(), 1)
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines:
        raise FormatError("empty hypergraph file")
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise FormatError("header must be 'n e'", no)
    n, e = int(parts[0]), int(parts[1])
    if len(lines) - 1 != e:
        raise FormatError(f"expected {e} edges, found {len(lines) - 1}")
    edges = []
    for no, ln in lines[1:]:
        try:
            verts = [int(tok) - 1 for tok in ln.split()]
        except ValueError:
            raise FormatError("edges must be integer lists", no) from None
        if any(not 0 <= v < n for v in verts):
            raise FormatError("vertex out of range", no)
        edges.append(verts)
    return Hypergraph.of(n, edges)


def format_hypergraph(h: Hypergraph) -> str:
    lines = [f"{h.vertices} {len(h.edges)}"]
    for e in h.edges:
        lines.append(" ".join(str(v + 1) for v in e))
    return "\n".join(lines) + "\n"
