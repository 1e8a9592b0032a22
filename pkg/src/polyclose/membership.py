"""Per-clone polynomial-time membership deciders and the prefix extension test.

Every decider answers "is v in the closure of r" directly from structure
(intersection witnesses, GF(2) elimination, atoms, pair tables, window
characterizations); none of them saturates the instance, so they form the
fast half of the dual route against the saturation oracle.
"""

from __future__ import annotations

import itertools

from .clones import CloneId, clone_base
from .core import BitVector, IndexSet, Relation, WidthMismatch, mask_of, project, project_bits
from .oracle import SaturationBudget, saturate_masks


def _check(r: Relation, v: BitVector):
    if r.width != v.width:
        raise WidthMismatch(f"vector width {v.width} != relation width {r.width}")


def member_i2(r: Relation, v: BitVector) -> bool:
    _check(r, v)
    return v.bits in r


def member_e2(r: Relation, v: BitVector) -> bool:
    """v is an intersection of rows iff it equals the intersection of all rows
    dominating it."""
    _check(r, v)
    acc = None
    for row in r.rows:
        if row & v.bits == v.bits:
            acc = row if acc is None else acc & row
    return acc == v.bits


# --- GF(2) ---------------------------------------------------------------


def gf2_echelon(rows) -> list[int]:
    """Row-reduced basis of the span; each basis vector keeps its top set bit
    unique."""
    basis: list[int] = []
    for row in rows:
        cur = row
        for b in basis:
            top = 1 << (b.bit_length() - 1)
            if cur & top:
                cur ^= b
        if cur:
            basis.append(cur)
            basis.sort(reverse=True)
    return basis


def gf2_reduce(vec: int, basis) -> int:
    cur = vec
    for b in basis:
        top = 1 << (b.bit_length() - 1)
        if cur & top:
            cur ^= b
    return cur


def member_l0(r: Relation, v: BitVector) -> bool:
    _check(r, v)
    return gf2_reduce(v.bits, gf2_echelon(r.rows)) == 0


def _solve_combination(rows, target: int) -> tuple[int | None, list[int]]:
    """Solve sum_{i in x} rows[i] = target over GF(2).

    Returns (one solution as a row-index mask or None, kernel basis of
    row-index masks).  Tracks combinations alongside elimination.
    """
    basis: list[tuple[int, int]] = []  # (vector, combo mask) with unique top bits
    kernel: list[int] = []
    for i, row in enumerate(rows):
        cur, combo = row, 1 << i
        for b, c in basis:
            top = 1 << (b.bit_length() - 1)
            if cur & top:
                cur ^= b
                combo ^= c
        if cur:
            basis.append((cur, combo))
            basis.sort(key=lambda t: t[0], reverse=True)
        else:
            kernel.append(combo)
    cur, combo = target, 0
    for b, c in basis:
        top = 1 << (b.bit_length() - 1)
        if cur & top:
            cur ^= b
            combo ^= c
    if cur:
        return None, kernel
    return combo, kernel


def member_l2(r: Relation, v: BitVector) -> bool:
    """v must be a sum of an odd number of rows: some point of the solution
    affine space has odd weight iff the particular solution does or some
    kernel basis vector does."""
    _check(r, v)
    if r.m == 0:
        raise ValueError("L2 membership needs a nonempty relation")
    combo, kernel = _solve_combination(r.rows, v.bits)
    if combo is None:
        return False
    if combo.bit_count() & 1:
        return True
    return any(k.bit_count() & 1 for k in kernel)


# --- atoms ---------------------------------------------------------------


def atoms_m2(r: Relation) -> list[int | None]:
    """atoms[i] = AND of all rows with a 1 at i, None when no row covers i."""
    atoms: list[int | None] = [None] * r.width
    for i in range(r.width):
        acc = None
        bit = 1 << i
        for row in r.rows:
            if row & bit:
                acc = row if acc is None else acc & row
        atoms[i] = acc
    return atoms


def atoms_m2_vectors(r: Relation) -> list[BitVector | None]:
    return [None if a is None else BitVector(r.width, a) for a in atoms_m2(r)]


def member_m2(r: Relation, v: BitVector) -> bool:
    _check(r, v)
    if r.m == 0:
        return False
    if v.bits == 0:
        return r.and_of_rows() == 0
    union = 0
    atoms = atoms_m2(r)
    for i in v.support():
        a = atoms[i]
        if a is None:
            return False
        union |= a
    return union == v.bits


def atoms_bf(r: Relation) -> list[int]:
    """Boolean-algebra atoms: AND over rows-with-1 and negated rows-with-0.

    Distinct atoms have disjoint supports and they cover every coordinate.
    """
    if r.m == 0:
        raise ValueError("BF atoms need a nonempty relation")
    full = mask_of(r.width)
    atoms = []
    for i in range(r.width):
        acc = full
        bit = 1 << i
        for row in r.rows:
            acc &= row if row & bit else row ^ full
        atoms.append(acc)
    return atoms


def atoms_bf_vectors(r: Relation) -> list[BitVector]:
    return [BitVector(r.width, a) for a in atoms_bf(r)]


def member_bf(r: Relation, v: BitVector) -> bool:
    _check(r, v)
    if r.m == 0:
        return False
    atoms = atoms_bf(r)
    union = 0
    for i in v.support():
        union |= atoms[i]
    return union == v.bits


def _constant_columns(r: Relation) -> tuple[int, int]:
    """(mask of constant-0 columns, mask of constant-1 columns)."""
    zeros = ones = 0
    full_rows = mask_of(r.m)
    for i, col in enumerate(r.columns):
        if col == 0:
            zeros |= 1 << i
        elif col == full_rows:
            ones |= 1 << i
    return zeros, ones


def member_r(r: Relation, v: BitVector) -> bool:
    """R keeps constant columns fixed; elsewhere its closure is the BF one."""
    _check(r, v)
    if r.m == 0:
        return False
    zeros, ones = _constant_columns(r)
    if v.bits & zeros or (v.bits & ones) != ones:
        return False
    keep = [i for i in range(r.width) if not ((zeros | ones) >> i) & 1]
    if not keep:
        return True
    sub = project(r, IndexSet(r.width, tuple(keep)))
    return member_bf(sub, BitVector(len(keep), project_bits(v.bits, keep)))


def member_r0(r: Relation, v: BitVector) -> bool:
    """R0 keeps constant-0 columns at 0; elsewhere BF (negation via x + 1)."""
    _check(r, v)
    if r.m == 0:
        return False
    zeros, _ones = _constant_columns(r)
    if v.bits & zeros:
        return False
    keep = [i for i in range(r.width) if not (zeros >> i) & 1]
    if not keep:
        return True
    sub = project(r, IndexSet(r.width, tuple(keep)))
    return member_bf(sub, BitVector(len(keep), project_bits(v.bits, keep)))


# --- S10 / S12 -----------------------------------------------------------


def member_s10(r: Relation, v: BitVector) -> bool:
    """Some row s must dominate v with v a union of atoms inside supp(s)."""
    _check(r, v)
    if r.m == 0:
        return False
    if v.bits == 0:
        floor = r.and_of_rows()
        return any(floor & s == 0 for s in r.rows)
    atoms = atoms_m2(r)
    union = 0
    for i in v.support():
        a = atoms[i]
        if a is None:
            return False
        union |= a
    return any(v.bits & ~s == 0 and union & s == v.bits for s in r.rows)


def always_one_columns(r: Relation) -> int:
    """Mask of columns that are 1 in every row (forced to 1 in S12 closures)."""
    _zeros, ones = _constant_columns(r)
    return ones


def member_s12(r: Relation, v: BitVector) -> bool:
    _check(r, v)
    if r.m == 0:
        return False
    imask = always_one_columns(r)
    if v.bits & imask != imask:
        return False
    rest = mask_of(r.width) ^ imask
    atoms = atoms_bf(r)
    union = 0
    for i in v.support():
        if (rest >> i) & 1:
            union |= atoms[i]
    return any(
        v.bits & ~s == 0 and union & rest & s == v.bits & rest for s in r.rows
    )


# --- pair and window characterizations ------------------------------------


def pair_table(r: Relation) -> list[list[int]]:
    """pairs[i][j] = bitmask over {0..3} of values (v_i v_j) present in rows."""
    n = r.width
    pairs = [[0] * n for _ in range(n)]
    for row in r.rows:
        for i in range(n):
            bi = (row >> i) & 1
            for j in range(i + 1, n):
                code = (bi << 1) | ((row >> j) & 1)
                pairs[i][j] |= 1 << code
    return pairs


def member_pairwise(clone: CloneId, r: Relation, v: BitVector) -> bool:
    """Maj-style membership: every 2-coordinate projection of v must lie in
    the pairwise closure (D2: values present; D1: their maj/xor3 closure)."""
    _check(r, v)
    if clone.tag not in ("D2", "D1"):
        raise ValueError("member_pairwise handles D2 and D1")
    if r.m == 0:
        return False
    n = r.width
    if n < 2:
        if clone.tag == "D2":
            return v.bits in r
        closed = saturate_masks(n, r.rows, clone_base(clone))
        return v.bits in set(closed)
    base = clone_base(clone)
    for i in range(n):
        for j in range(i + 1, n):
            proj = {((row >> i) & 1) | (((row >> j) & 1) << 1) for row in r.rows}
            want = ((v.bits >> i) & 1) | (((v.bits >> j) & 1) << 1)
            if clone.tag == "D2":
                ok = want in proj
            else:
                ok = want in set(saturate_masks(2, proj, base))
            if not ok:
                return False
    return True


def window_member_s10k(rows, v_bits: int, width: int) -> bool:
    """Closed form for width <= k windows of the Th_k^{k+1} clone, k > 3:
    v must be dominated by a row and every (1,0) pattern of v must appear in
    some row; the all-zero vector instead needs the AND of rows to vanish."""
    if not rows:
        return False
    if v_bits == 0:
        acc = mask_of(width)
        for row in rows:
            acc &= row
        return acc == 0
    if not any(v_bits & ~row == 0 for row in rows):
        return False
    ones = v_bits
    zeros = mask_of(width) ^ v_bits
    for i in range(width):
        if not (ones >> i) & 1:
            continue
        need = zeros
        for row in rows:
            if (row >> i) & 1:
                need &= row
        # need = zero-coords of v never 0 alongside a 1 at i
        if need:
            return False
    return True


def window_member_s12k(rows, v_bits: int, width: int) -> bool:
    """Closed form for width <= k windows of the S12^k clones, k > 3."""
    if not rows:
        return False
    cmask = mask_of(width)
    ones_cols = cmask
    for row in rows:
        ones_cols &= row
    if v_bits & ones_cols != ones_cols:
        return False
    if not any(v_bits & ~row == 0 for row in rows):
        return False
    rest = cmask ^ ones_cols
    vr = v_bits & rest
    zr = rest & ~v_bits
    for i in range(width):
        if not (vr >> i) & 1:
            continue
        # every j with v_j = 0 needs a row where coordinates i and j differ
        need = zr
        for row in rows:
            need &= row if (row >> i) & 1 else ~row
        if need & rest:
            return False
    return True


def member_kwise(
    clone: CloneId,
    r: Relation,
    v: BitVector,
    budget: SaturationBudget | None = None,
) -> bool:
    """Window test for the threshold hierarchies: v belongs iff each k-window
    projection lies in the window closure.  k >= 4 uses closed forms; smaller
    k saturates the tiny windows; k >= n falls back to full saturation."""
    _check(r, v)
    if clone.tag not in ("S10K", "S12K"):
        raise ValueError("member_kwise handles S10K/S12K")
    if r.m == 0:
        return False
    k = clone.k
    n = r.width
    budget = budget or SaturationBudget()
    if k >= n:
        closed = saturate_masks(n, r.rows, clone_base(clone), budget=budget)
        return v.bits in set(closed)
    base = clone_base(clone)
    for combo in itertools.combinations(range(n), k):
        pv = project_bits(v.bits, combo)
        rows = {project_bits(row, combo) for row in r.rows}
        if k >= 4:
            if clone.tag == "S10K":
                ok = window_member_s10k(rows, pv, k)
            else:
                ok = window_member_s12k(rows, pv, k)
        else:
            ok = pv in set(saturate_masks(k, rows, base, budget=budget))
        if not ok:
            return False
    return True


# --- dispatch --------------------------------------------------------------


def make_member(clone: CloneId, r: Relation, budget: SaturationBudget | None = None):
    """Decider factory: precomputes the clone's instance structures (atoms,
    pair tables, window closures) once and returns a fast per-vector test."""
    tag = clone.tag
    budget = budget or SaturationBudget()
    if tag in ("S10K", "S12K"):
        k, n = clone.k, r.width
        if r.m == 0:
            return lambda v: False
        if k >= n:
            closed = frozenset(saturate_masks(n, r.rows, clone_base(clone), budget=budget))
            return lambda v: v.bits in closed
        base = clone_base(clone)
        windows = []
        for combo in itertools.combinations(range(n), k):
            rows = {project_bits(row, combo) for row in r.rows}
            if k >= 4:
                ok = window_member_s10k if tag == "S10K" else window_member_s12k
                cs = frozenset(x for x in range(1 << k) if ok(rows, x, k))
            else:
                cs = frozenset(saturate_masks(k, rows, base, budget=budget))
            windows.append((combo, cs))

        def decide(v: BitVector) -> bool:
            _check(r, v)
            return all(project_bits(v.bits, combo) in cs for combo, cs in windows)

        return decide
    if tag in ("D2", "D1"):
        n = r.width
        if r.m == 0:
            return lambda v: False
        if n < 2:
            closed = frozenset(saturate_masks(n, r.rows, clone_base(clone), budget=budget))
            return lambda v: v.bits in closed
        base = clone_base(clone)
        pairs = []
        for i in range(n):
            for j in range(i + 1, n):
                proj = {((row >> i) & 1) | (((row >> j) & 1) << 1) for row in r.rows}
                if tag == "D1":
                    proj = set(saturate_masks(2, proj, base, budget=budget))
                pairs.append((i, j, frozenset(proj)))

        def decide(v: BitVector) -> bool:
            _check(r, v)
            b = v.bits
            return all(
                (((b >> i) & 1) | (((b >> j) & 1) << 1)) in proj
                for i, j, proj in pairs
            )

        return decide
    return lambda v: member(clone, r, v, budget=budget)


def member(clone: CloneId, r: Relation, v: BitVector, budget=None) -> bool:
    tag = clone.tag
    if tag == "I2":
        return member_i2(r, v)
    if tag == "E2":
        return member_e2(r, v)
    if tag == "L0":
        return member_l0(r, v)
    if tag == "L2":
        return member_l2(r, v)
    if tag == "M2":
        return member_m2(r, v)
    if tag == "BF":
        return member_bf(r, v)
    if tag == "R":
        return member_r(r, v)
    if tag == "R0":
        return member_r0(r, v)
    if tag == "S10":
        return member_s10(r, v)
    if tag == "S12":
        return member_s12(r, v)
    if tag in ("D2", "D1"):
        return member_pairwise(clone, r, v)
    if tag in ("S10K", "S12K"):
        return member_kwise(clone, r, v, budget=budget)
    raise ValueError(f"no membership decider for {clone}")


def extension(clone: CloneId, r: Relation, prefix: BitVector, budget=None) -> bool:
    """Is some closure element an extension of the given prefix?

    Because the operations act coordinatewise this is membership of the
    prefix in the closure of the prefix-projected relation.
    """
    l = prefix.width
    if l > r.width:
        raise WidthMismatch("prefix longer than the relation width")
    if l == 0:
        return r.m > 0
    if l == r.width:
        return member(clone, r, prefix, budget=budget)
    sub = project(r, IndexSet(r.width, tuple(range(l))))
    return member(clone, sub, prefix, budget=budget)
