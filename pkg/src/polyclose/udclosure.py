"""Closures augmented with per-coordinate raise/clear operators.

Each supported clone reduces to a plain clone enumeration: forced and free
coordinates are projected out (the trace replays them onto solutions), the
S10 case augments the instance with raised rows, unit vectors and cleared
atom rows, the S12 case adds one cleared witness row per downward operator,
and the near-unanimity clones keep the window flashlight with operator-aware
window closures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clones import CloneId, ReductionTrace, TraceStep, clone_base
from .core import BitVector, IndexSet, Relation, mask_of, project_bits
from .enumeration import _echelon, _gen_gray_span, _gen_s10, _gen_s12
from .formulas import enum_dnf_models
from .membership import member_l0, member_l2, member_s10, member_s12
from .oracle import DEFAULT_BUDGET, saturate_masks
from .streams import OpCounter, SolutionStream


@dataclass(frozen=True)
class UDSpec:
    """Disjoint index sets carrying upward / downward closure operators."""

    up: IndexSet
    down: IndexSet

    def __post_init__(self):
        if self.up.width != self.down.width:
            raise ValueError("up/down index sets must share a width")
        if set(self.up.members) & set(self.down.members):
            raise ValueError("a coordinate cannot carry both operators")

    @classmethod
    def of(cls, width: int, up=(), down=()) -> "UDSpec":
        return cls(IndexSet.of(width, up), IndexSet.of(width, down))

    @property
    def width(self) -> int:
        return self.up.width

    def is_empty(self) -> bool:
        return not self.up.members and not self.down.members


SUPPORTED_UD = ("I2", "E2", "L0", "L2", "S10", "S12", "S10K", "S12K", "D2", "D1")


class UnsupportedUDClone(ValueError):
    pass


def _require_supported(clone: CloneId):
    if clone.tag not in SUPPORTED_UD:
        raise UnsupportedUDClone(
            f"upward/downward operators are not supported for clone {clone}"
        )


# --- column eliminations ------------------------------------------------------


def _apply_steps(r: Relation, steps) -> Relation:
    for step in steps:
        r = step.apply(r)
    return r


def _project_vector(steps, bits: int) -> int | None:
    """Replay column drops on a vector; None when it contradicts a constant."""
    for st in steps:
        if st.kind == "DropConstantColumn":
            i, val = st.payload
            if (bits >> i) & 1 != val:
                return None
        elif st.kind == "DropFreeColumn":
            i = st.payload
        else:
            raise ValueError(st.kind)
        bits = (bits & ((1 << i) - 1)) | ((bits >> (i + 1)) << i)
    return bits


def _map_positions(steps, width: int):
    """original coordinate -> reduced position for a chain of column drops."""
    positions: list[int | None] = list(range(width))
    for st in steps:
        i = st.payload if st.kind == "DropFreeColumn" else st.payload[0]
        positions = [
            p if p is None or p < i else (None if p == i else p - 1)
            for p in positions
        ]
    return {orig: p for orig, p in enumerate(positions) if p is not None}


def _column_reduction_linear(r: Relation, ud: UDSpec, affine: bool):
    """Free/constant coordinate elimination shared by the L0 and L2 cases.

    Under +, upward coordinates are always free (the zero vector yields the
    unit vector); downward ones are free when their column has a 1.  Under
    x+y+z a constant column with an operator that cannot move it stays fixed.
    """
    full_rows = mask_of(r.m)
    steps = []
    for i in sorted(range(r.width), reverse=True):
        col = r.columns[i]
        if i in ud.up.members:
            if affine and col == full_rows:
                steps.append(TraceStep("DropConstantColumn", (i, 1)))
            else:
                steps.append(TraceStep("DropFreeColumn", i))
        elif i in ud.down.members:
            if col == 0:
                steps.append(TraceStep("DropConstantColumn", (i, 0)))
            else:
                steps.append(TraceStep("DropFreeColumn", i))
    return steps


def _normalize_s10_s12(r: Relation, ud: UDSpec):
    """Project out per-coordinate constants.  A constant column with an
    opposing operator is free: dropping that operator's uses in any derivation
    resurrects the constant value without touching other coordinates."""
    full_rows = mask_of(r.m)
    steps = []
    for i in sorted(range(r.width), reverse=True):
        col = r.columns[i]
        if col == full_rows:
            if i in ud.down.members:
                steps.append(TraceStep("DropFreeColumn", i))
            else:
                steps.append(TraceStep("DropConstantColumn", (i, 1)))
        elif col == 0:
            if i in ud.up.members:
                steps.append(TraceStep("DropFreeColumn", i))
            else:
                steps.append(TraceStep("DropConstantColumn", (i, 0)))
    return steps


def _s10_s12_reduction(tag: str, r: Relation, ud: UDSpec):
    """(steps, reduced relation, surviving up, surviving down); for S12 the
    surviving upward coordinates are additionally projected out as free."""
    steps = _normalize_s10_s12(r, ud)
    red = _apply_steps(r, steps)
    pos = _map_positions(steps, r.width)
    up = tuple(pos[i] for i in ud.up.members if i in pos)
    down = tuple(pos[i] for i in ud.down.members if i in pos)
    if tag == "S12" and up:
        extra = [TraceStep("DropFreeColumn", i) for i in sorted(up, reverse=True)]
        keep = [p for p in range(red.width) if p not in set(up)]
        remap = {p: q for q, p in enumerate(keep)}
        down = tuple(remap[p] for p in down)
        steps.extend(extra)
        red = _apply_steps(red, extra)
        up = ()
    return steps, red, up, down


def _s10_ud_instance(r: Relation, up, down) -> Relation:
    """Augmented generators for the S10 case: raised rows, unit vectors for
    each raise, and the per-coordinate cleared atom rows."""
    n = r.width
    umask = sum(1 << i for i in up)
    dmask = sum(1 << i for i in down)
    rows = list(r.rows)
    rows.extend(row | umask for row in r.rows)
    rows.extend(1 << i for i in up)
    prelim = Relation(n, rows)
    for i in range(n):
        inter = None
        for row in prelim.rows:
            if (row >> i) & 1:
                inter = row if inter is None else inter & row
        if inter is not None:
            rows.append(inter & ~(dmask & ~(1 << i)))
    return Relation(n, rows)


def _s12_ud_instance(r: Relation, down) -> Relation:
    """One cleared witness row per downward coordinate: the clone replays the
    operator as x AND (s -> cleared-s)."""
    rows = list(r.rows)
    for i in down:
        bit = 1 << i
        for row in r.rows:
            if row & bit:
                rows.append(row & ~bit)
                break
    return Relation(r.width, rows)


# --- the plain-operator and E2 cases -------------------------------------------


def _row_terms(r: Relation, ud: UDSpec):
    umask, dmask = ud.up.mask(), ud.down.mask()
    terms = []
    for row in r.rows:
        lits = []
        for i in range(r.width):
            if (row >> i) & 1:
                if not (dmask >> i) & 1:
                    lits.append((i, True))
            elif not (umask >> i) & 1:
                lits.append((i, False))
        terms.append(frozenset(lits))
    return terms


def _gen_e2_ud(r: Relation, ud: UDSpec, counter: OpCounter):
    """COMP/COUNT flashlight where setting a raised coordinate to 1 or a
    cleared one to 0 is a free move; everything else is plain E2."""
    n, m = r.width, r.m
    if m == 0:
        return
    umask, dmask = ud.up.mask(), ud.down.mask()
    rows = r.rows
    zeros_of = [[j for j in range(n) if not (row >> j) & 1] for row in rows]
    rows_zero_at = [[] for _ in range(n)]
    for ri, zs in enumerate(zeros_of):
        for j in zs:
            rows_zero_at[j].append(ri)
    comp = [True] * m
    count = [len(rows_zero_at[j]) for j in range(n)]
    state = {"ncomp": m}

    def walk(i: int, ones: int, zmask: int):
        counter.tick()
        if i == n:
            yield ones
            return
        if (dmask >> i) & 1:
            yield from walk(i + 1, ones, zmask)
        elif count[i] > 0:
            yield from walk(i + 1, ones, zmask | (1 << i))
        if (umask >> i) & 1:
            yield from walk(i + 1, ones | (1 << i), zmask)
            return
        removed = []
        dead = False
        for ri in rows_zero_at[i]:
            if comp[ri]:
                comp[ri] = False
                state["ncomp"] -= 1
                removed.append(ri)
                for j in zeros_of[ri]:
                    counter.tick()
                    count[j] -= 1
                    if count[j] == 0 and (zmask >> j) & 1:
                        dead = True
        if not dead and state["ncomp"] > 0:
            yield from walk(i + 1, ones | (1 << i), zmask)
        for ri in removed:
            comp[ri] = True
            state["ncomp"] += 1
            for j in zeros_of[ri]:
                counter.tick()
                count[j] += 1

    yield from walk(0, 0, 0)


def member_e2_ud(r: Relation, ud: UDSpec, v: BitVector) -> bool:
    if r.m == 0:
        return False
    umask, dmask = ud.up.mask(), ud.down.mask()
    need_ones = v.bits & ~umask
    comp = [row for row in r.rows if row & need_ones == need_ones]
    if not comp:
        return False
    acc = mask_of(r.width)
    for row in comp:
        acc &= row
    must_zero = ~v.bits & ~dmask & mask_of(r.width)
    return acc & must_zero == 0


# --- near-unanimity window machinery --------------------------------------------


def _ud_window_closure(r: Relation, members, base, upset, downset, budget):
    rows = {project_bits(row, members) for row in r.rows}
    wu = [p for p, i in enumerate(members) if i in upset]
    wd = [p for p, i in enumerate(members) if i in downset]
    return frozenset(
        saturate_masks(len(members), rows, base, up=wu, down=wd, budget=budget)
    )


def _gen_bp_ud(r: Relation, k: int, base, ud: UDSpec, counter, budget):
    n = r.width
    if r.m == 0:
        return
    upset, downset = set(ud.up.members), set(ud.down.members)
    prefix_sets = {
        l: _ud_window_closure(r, tuple(range(l)), base, upset, downset, budget)
        for l in range(1, min(k, n))
    }
    windows_by_last: dict[int, list] = {l: [] for l in range(n)}
    for combo in itertools.combinations(range(n), k):
        cs = _ud_window_closure(r, combo, base, upset, downset, budget)
        windows_by_last[combo[-1]].append((combo, cs))

    def extend_ok(bits: int, depth: int) -> bool:
        if depth < k:
            counter.tick()
            return bits in prefix_sets[depth]
        for combo, cs in windows_by_last[depth - 1]:
            counter.tick()
            if project_bits(bits, combo) not in cs:
                return False
        return True

    def walk(depth: int, bits: int):
        counter.tick()
        if depth == n:
            yield bits
            return
        for b in (0, 1):
            cand = bits | (b << depth)
            if extend_ok(cand, depth + 1):
                yield from walk(depth + 1, cand)

    yield from walk(0, 0)


# --- public entry points ----------------------------------------------------------


def enum_ud(
    clone: CloneId,
    r: Relation,
    ud: UDSpec,
    counter: OpCounter | None = None,
    budget=DEFAULT_BUDGET,
) -> SolutionStream:
    """Enumerate the closure of r under the clone plus the given operators."""
    from .enumeration import enumerate_closure

    _require_supported(clone)
    if ud.width != r.width:
        raise ValueError("operator spec width differs from the relation width")
    if ud.is_empty():
        return enumerate_closure(clone, r, counter=counter, budget=budget)
    counter = counter or OpCounter()
    n = r.width
    if r.m == 0:
        return SolutionStream(iter(()), counter, algorithm="empty")
    tag = clone.tag

    if tag == "I2":
        inner = enum_dnf_models(_row_terms(r, ud), n, counter)
        return SolutionStream(iter(inner), counter, algorithm="ud-dnf-models")

    if tag == "E2":
        masks = _gen_e2_ud(r, ud, counter)
        gen = (BitVector(n, m) for m in masks)
        return SolutionStream(gen, counter, algorithm="ud-e2-flashlight")

    if tag in ("L0", "L2"):
        steps = _column_reduction_linear(r, ud, affine=(tag == "L2"))
        red = _apply_steps(r, steps)
        trace = ReductionTrace(n, steps)
        if tag == "L0":
            raw = _gen_gray_span(0, _echelon(red.rows), counter)
        else:
            v0 = red.rows[0]
            raw = _gen_gray_span(v0, _echelon([x ^ v0 for x in red.rows[1:]]), counter)
        gen = (BitVector(n, b) for b in trace.lift_bits(raw))
        return SolutionStream(gen, counter, algorithm=f"ud-{tag.lower()}-gray")

    if tag in ("S10", "S12"):
        steps, red, up, down = _s10_s12_reduction(tag, r, ud)
        trace = ReductionTrace(n, steps)
        if tag == "S10":
            inst = _s10_ud_instance(red, up, down)
            raw = _gen_s10(inst, counter)
        else:
            inst = _s12_ud_instance(red, down)
            raw = _gen_s12(inst, counter)
        gen = (BitVector(n, b) for b in trace.lift_bits(raw))
        return SolutionStream(gen, counter, algorithm=f"ud-{tag.lower()}")

    k = 2 if tag in ("D2", "D1") else clone.k
    base = clone_base(clone)
    if k >= n:
        elems = saturate_masks(
            n, r.rows, base, up=ud.up.members, down=ud.down.members, budget=budget
        )
        gen = (BitVector(n, m) for m in elems)
        return SolutionStream(
            gen,
            counter,
            algorithm="ud-saturation-fallback",
            polynomial_delay=False,
            notes=("k>=n", "non-polynomial-delay"),
        )
    masks = _gen_bp_ud(r, k, base, ud, counter, budget)
    gen = (BitVector(n, m) for m in masks)
    return SolutionStream(gen, counter, algorithm=f"ud-window-flashlight-k{k}")


def member_ud(
    clone: CloneId, r: Relation, ud: UDSpec, v: BitVector, budget=DEFAULT_BUDGET
) -> bool:
    """Membership in the operator-augmented closure."""
    from .membership import member

    _require_supported(clone)
    if ud.is_empty():
        return member(clone, r, v, budget=budget)
    if r.m == 0:
        return False
    tag = clone.tag
    n = r.width

    if tag == "I2":
        umask, dmask = ud.up.mask(), ud.down.mask()
        for row in r.rows:
            movable = (umask & ~row) | (dmask & row)
            if (v.bits ^ row) & ~movable & mask_of(n) == 0:
                return True
        return False

    if tag == "E2":
        return member_e2_ud(r, ud, v)

    if tag in ("L0", "L2"):
        steps = _column_reduction_linear(r, ud, affine=(tag == "L2"))
        red = _apply_steps(r, steps)
        pv = _project_vector(steps, v.bits)
        if pv is None:
            return False
        vv = BitVector(red.width, pv)
        return member_l0(red, vv) if tag == "L0" else member_l2(red, vv)

    if tag in ("S10", "S12"):
        steps, red, up, down = _s10_s12_reduction(tag, r, ud)
        pv = _project_vector(steps, v.bits)
        if pv is None:
            return False
        vv = BitVector(red.width, pv)
        if tag == "S10":
            return member_s10(_s10_ud_instance(red, up, down), vv)
        return member_s12(_s12_ud_instance(red, down), vv)

    k = 2 if tag in ("D2", "D1") else clone.k
    base = clone_base(clone)
    if k >= n:
        elems = saturate_masks(
            n, r.rows, base, up=ud.up.members, down=ud.down.members, budget=budget
        )
        return v.bits in set(elems)
    upset, downset = set(ud.up.members), set(ud.down.members)
    for combo in itertools.combinations(range(n), k):
        closure = _ud_window_closure(r, combo, base, upset, downset, budget)
        if project_bits(v.bits, combo) not in closure:
            return False
    return True
