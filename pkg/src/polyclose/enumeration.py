"""Closure enumerators: the generic flashlight and the per-clone
polynomial-delay algorithms, instrumented for delay-bound checks.

Internal generators yield packed int masks; the dispatcher lifts them through
the reduction trace and wraps them into a SolutionStream of BitVectors.
"""

from __future__ import annotations

import itertools

from .clones import (
    UNCLASSIFIED,
    CloneId,
    OperationTable,
    ReductionTrace,
    clone_base,
    reduce_instance,
)
from .core import BitVector, Relation, lex_key, mask_of, project_bits
from .formulas import build_phi_d2, enum_2cnf_models
from .membership import (
    atoms_bf,
    atoms_m2,
    member,
    window_member_s10k,
    window_member_s12k,
)
from .oracle import DEFAULT_BUDGET, SaturationBudget, saturate_masks
from .streams import OpCounter, SolutionStream


# --- raw generators (packed masks) -------------------------------------------


def _gen_rows(r: Relation, counter: OpCounter):
    for row in r.rows:
        counter.tick()
        yield row


def _gen_e2(r: Relation, counter: OpCounter):
    """Amortized backtrack search: COMP/COUNT structures make the 0-branch an
    O(1) test and charge each row removal once per branch."""
    n, m = r.width, r.m
    if m == 0:
        return
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
        if count[i] > 0:
            yield from walk(i + 1, ones, zmask | (1 << i))
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


def _gray_flips(k: int):
    """Flip indices of the reflected Gray walk over k bits (2^k - 1 steps)."""
    step = 0
    total = 1 << k
    while step + 1 < total:
        step += 1
        yield (step & -step).bit_length() - 1


def _gen_gray_span(base_point: int, basis: list[int], counter: OpCounter):
    current = base_point
    counter.tick()
    yield current
    for flip in _gray_flips(len(basis)):
        counter.tick()
        current ^= basis[flip]
        yield current


def _echelon(rows) -> list[int]:
    basis: list[int] = []
    for row in rows:
        cur = row
        for b in basis:
            if cur & (1 << (b.bit_length() - 1)):
                cur ^= b
        if cur:
            basis.append(cur)
            basis.sort(reverse=True)
    return basis


def _gen_l0(r: Relation, counter: OpCounter):
    if r.m == 0:
        return
    yield from _gen_gray_span(0, _echelon(r.rows), counter)


def _gen_l2(r: Relation, counter: OpCounter):
    if r.m == 0:
        return
    v0 = r.rows[0]
    dirs = _echelon([row ^ v0 for row in r.rows[1:]])
    yield from _gen_gray_span(v0, dirs, counter)


def _m2_lex_gen(
    atoms: list[int | None],
    floor: int,
    support: int,
    counter: OpCounter,
):
    """Ascending-lex walk over the union lattice of M2 atoms above `floor`,
    restricted to coordinates inside `support`.

    At each pending coordinate the 0-branch comes first and prunes every atom
    that would resurrect the skipped coordinate, which makes the two branches
    disjoint and the whole walk duplicate-free with O(n) delay.
    """
    pending = [
        i
        for i in range(support.bit_length())
        if (support >> i) & 1 and atoms[i] is not None and not (floor >> i) & 1
    ]
    eff_atoms = {i: atoms[i] & support for i in pending}

    def walk(pos: int, union: int, zmask: int):
        counter.tick()
        if pos == len(pending):
            yield union
            return
        c = pending[pos]
        bit = 1 << c
        if not union & bit:
            yield from walk(pos + 1, union, zmask | bit)
        atom = eff_atoms[c]
        if atom & zmask == 0:
            yield from walk(pos + 1, union | atom, zmask)

    yield from walk(0, floor & support, 0)


def _gen_m2(r: Relation, counter: OpCounter):
    if r.m == 0:
        return
    atoms = atoms_m2(r)
    floor = r.and_of_rows()
    yield from _m2_lex_gen(atoms, floor, mask_of(r.width), counter)


def _distinct_bf_atoms(r: Relation, support: int) -> list[int]:
    """Distinct nonzero BF atoms restricted to `support`, most significant
    (smallest minimum coordinate) first."""
    atoms = atoms_bf(r)
    seen = set()
    out = []
    for i in range(r.width):
        if not (support >> i) & 1:
            continue
        a = atoms[i] & support
        if a and a not in seen:
            seen.add(a)
            out.append(a)
    out.sort(key=lambda a: (a & -a).bit_length())
    return out


def _gen_bf_gray(r: Relation, counter: OpCounter):
    """All unions of the disjoint atoms by a Gray walk: one flip per yield."""
    if r.m == 0:
        return
    atoms = _distinct_bf_atoms(r, mask_of(r.width))
    current = 0
    counter.tick()
    yield current
    for flip in _gray_flips(len(atoms)):
        counter.tick()
        current ^= atoms[flip]
        yield current


def _gen_bf_lex(base: int, atoms: list[int], counter: OpCounter):
    """Unions of disjoint atoms in ascending lexicographic order: binary
    counting with the smallest-coordinate atom as the most significant bit."""
    a = len(atoms)
    for code in range(1 << a):
        union = base
        for idx in range(a):
            counter.tick()
            if (code >> (a - 1 - idx)) & 1:
                union |= atoms[idx]
        yield union


def _merge_ascending(substreams, width: int, counter: OpCounter):
    """Merge strictly-ascending mask generators, always emitting the smallest
    pending head and advancing every stream that shows it."""
    heads = []
    for gen in substreams:
        try:
            bits = next(gen)
        except StopIteration:
            continue
        heads.append([lex_key(bits, width), bits, gen])
    while heads:
        best = min(h[0] for h in heads)
        counter.tick(len(heads))
        emitted = None
        survivors = []
        for h in heads:
            if h[0] != best:
                survivors.append(h)
                continue
            emitted = h[1]
            try:
                bits = next(h[2])
            except StopIteration:
                continue
            h[0] = lex_key(bits, width)
            counter.tick()
            h[1] = bits
            survivors.append(h)
        heads = survivors
        yield emitted


def _gen_s10(r: Relation, counter: OpCounter):
    """Union over rows s of the monotone-lattice closure inside supp(s),
    merged from per-row ascending streams."""
    if r.m == 0:
        return
    atoms = atoms_m2(r)
    floor = r.and_of_rows()
    subs = [_m2_lex_gen(atoms, floor & s, s, counter) for s in r.rows]
    yield from _merge_ascending(subs, r.width, counter)


def _gen_s12(r: Relation, counter: OpCounter):
    if r.m == 0:
        return
    full_rows = mask_of(r.m)
    imask = 0
    for i, col in enumerate(r.columns):
        if col == full_rows:
            imask |= 1 << i
    rest = mask_of(r.width) ^ imask
    subs = []
    for s in r.rows:
        support = s & rest
        atoms = _distinct_bf_atoms(r, support)
        subs.append(_gen_bf_lex(imask, atoms, counter))
    yield from _merge_ascending(subs, r.width, counter)


def _gen_kwise(
    r: Relation, k: int, base: tuple[OperationTable, ...], tag: str, counter: OpCounter
):
    """Backtrack search whose extension test only validates the k-windows that
    contain the newly assigned coordinate, against precomputed window
    closures (saturated for k <= 3, closed forms beyond)."""
    n = r.width
    if r.m == 0:
        return
    prefix_sets = {}
    for l in range(1, min(k, n)):
        rows = {row & mask_of(l) for row in r.rows}
        prefix_sets[l] = frozenset(saturate_masks(l, rows, base))
    windows_by_last: dict[int, list[tuple[tuple[int, ...], frozenset]]] = {
        l: [] for l in range(n)
    }
    for combo in itertools.combinations(range(n), k):
        rows = {project_bits(row, combo) for row in r.rows}
        if k >= 4:
            ok = window_member_s10k if tag == "S10K" else window_member_s12k
            cs = frozenset(v for v in range(1 << k) if ok(rows, v, k))
        else:
            cs = frozenset(saturate_masks(k, rows, base))
        windows_by_last[combo[-1]].append((combo, cs))

    def extend_ok(bits: int, depth: int) -> bool:
        # depth = number of assigned coordinates, last assigned is depth-1
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


def _gen_flashlight(clone: CloneId, r: Relation, counter: OpCounter, budget=None):
    """Generic backtrack search: descend only when the prefix is a projection
    of a closure element, decided by the clone's membership decider."""
    n = r.width
    if r.m == 0:
        return

    prefix_rows = [None] * (n + 1)

    def prefix_relation(l: int) -> Relation:
        if prefix_rows[l] is None:
            prefix_rows[l] = Relation(l, (row & mask_of(l) for row in r.rows))
        return prefix_rows[l]

    def walk(depth: int, bits: int):
        counter.tick(r.m)
        if depth == n:
            yield bits
            return
        for b in (0, 1):
            cand = bits | (b << depth)
            sub = prefix_relation(depth + 1)
            if member(clone, sub, BitVector(depth + 1, cand), budget=budget):
                yield from walk(depth + 1, cand)

    yield from walk(0, 0)


# --- public per-clone streams --------------------------------------------------


def _stream(gen_fn, r: Relation, algorithm: str, counter=None, notes=()):
    counter = counter or OpCounter()
    masks = gen_fn(r, counter)
    width = r.width
    gen = (BitVector(width, m) for m in masks)
    return SolutionStream(gen, counter, algorithm=algorithm, notes=tuple(notes))


def enum_e2(r: Relation, counter=None) -> SolutionStream:
    return _stream(_gen_e2, r, "e2-amortized-flashlight", counter)


def enum_l0(r: Relation, counter=None) -> SolutionStream:
    return _stream(_gen_l0, r, "l0-gray-span", counter)


def enum_l2(r: Relation, counter=None) -> SolutionStream:
    if r.m == 0:
        raise ValueError("L2 enumeration needs a nonempty relation")
    return _stream(_gen_l2, r, "l2-gray-affine", counter)


def enum_m2(r: Relation, counter=None) -> SolutionStream:
    return _stream(_gen_m2, r, "m2-atom-flashlight", counter)


def enum_bf(r: Relation, counter=None) -> SolutionStream:
    return _stream(_gen_bf_gray, r, "bf-atom-gray", counter)


def enum_s10(r: Relation, counter=None) -> SolutionStream:
    return _stream(_gen_s10, r, "s10-lex-merge", counter)


def enum_s12(r: Relation, counter=None) -> SolutionStream:
    return _stream(_gen_s12, r, "s12-lex-merge", counter)


def enum_d2_via_2sat(r: Relation, counter=None) -> SolutionStream:
    counter = counter or OpCounter()
    clauses = build_phi_d2(r)
    inner = enum_2cnf_models(clauses, r.width, counter)
    return SolutionStream(iter(inner), counter, algorithm="d2-2cnf-flashlight")


def enum_r_r0(clone: CloneId, r: Relation, counter=None) -> SolutionStream:
    if clone.tag not in ("R", "R0"):
        raise ValueError("enum_r_r0 handles R and R0")
    return enumerate_closure(clone, r, counter=counter)


def enum_kwise(clone: CloneId, r: Relation, counter=None) -> SolutionStream:
    counter = counter or OpCounter()
    if clone.tag == "D1":
        k, base, tag = min(2, r.width), clone_base(clone), "D1"
    elif clone.tag in ("S10K", "S12K"):
        k, base, tag = clone.k, clone_base(clone), clone.tag
        if k >= r.width:
            raise ValueError("k >= n: enumerate_closure falls back to saturation")
    else:
        raise ValueError("enum_kwise handles D1/S10K/S12K")
    masks = _gen_kwise(r, k, base, tag, counter)
    gen = (BitVector(r.width, m) for m in masks)
    return SolutionStream(gen, counter, algorithm=f"kwise-flashlight-k{k}")


def flashlight(clone: CloneId, r: Relation, counter=None, budget=None) -> SolutionStream:
    counter = counter or OpCounter()
    masks = _gen_flashlight(clone, r, counter, budget=budget)
    gen = (BitVector(r.width, m) for m in masks)
    return SolutionStream(gen, counter, algorithm="generic-flashlight")


# --- dispatcher ------------------------------------------------------------------


def _reduced_generator(clone: CloneId, red: Relation, counter: OpCounter, budget):
    """(mask generator over the reduced instance, algorithm, notes)."""
    tag = clone.tag
    n = red.width
    if tag == "I2":
        return _gen_rows(red, counter), "i2-rows", ()
    if tag == "E2":
        return _gen_e2(red, counter), "e2-amortized-flashlight", ()
    if tag == "L0":
        return _gen_l0(red, counter), "l0-gray-span", ()
    if tag == "L2":
        return _gen_l2(red, counter), "l2-gray-affine", ()
    if tag == "M2":
        return _gen_m2(red, counter), "m2-atom-flashlight", ()
    if tag in ("BF", "R", "R0"):
        return _gen_bf_gray(red, counter), "bf-atom-gray", ()
    if tag == "S10":
        return _gen_s10(red, counter), "s10-lex-merge", ()
    if tag == "S12":
        return _gen_s12(red, counter), "s12-lex-merge", ()
    if tag == "D2":
        if n < 2:
            return _gen_rows(red, counter), "i2-rows", ()
        clauses = build_phi_d2(red)
        inner = enum_2cnf_models(clauses, n, counter)
        return (v.bits for v in inner), "d2-2cnf-flashlight", ()
    if tag == "D1":
        if n < 2:
            gen = iter(saturate_masks(n, red.rows, clone_base(clone), budget=budget))
            return gen, "saturation", ()
        return (
            _gen_kwise(red, 2, clone_base(clone), "D1", counter),
            "kwise-flashlight-k2",
            (),
        )
    if tag in ("S10K", "S12K"):
        k = clone.k
        if k >= n:
            gen = iter(saturate_masks(n, red.rows, clone_base(clone), budget=budget))
            return gen, "saturation-fallback", ("k>=n", "non-polynomial-delay")
        return (
            _gen_kwise(red, k, clone_base(clone), tag, counter),
            f"kwise-flashlight-k{k}",
            (),
        )
    raise ValueError(f"no enumerator for clone {clone}")


def enumerate_closure(
    clone_or_ops,
    r: Relation,
    counter: OpCounter | None = None,
    budget: SaturationBudget | None = None,
) -> SolutionStream:
    """Dispatch: normalize the instance, run the best specialized enumerator,
    lift solutions back through the reduction trace."""
    counter = counter or OpCounter()
    budget = budget or DEFAULT_BUDGET
    if r.m == 0:
        stream = SolutionStream(iter(()), counter, algorithm="empty")
        stream.reductions = []
        return stream
    clone, red, trace = reduce_instance(clone_or_ops, r)
    if clone == UNCLASSIFIED:
        ops = list(clone_or_ops)
        elems = saturate_masks(r.width, r.rows, ops, budget=budget)
        gen = (BitVector(r.width, m) for m in elems)
        stream = SolutionStream(
            gen,
            counter,
            algorithm="saturation-fallback",
            polynomial_delay=False,
            notes=("unclassified-ops", "non-polynomial-delay"),
        )
        stream.reductions = []
        return stream
    raw, algorithm, notes = _reduced_generator(clone, red, counter, budget)
    lifted = trace.lift_bits(raw)

    def ticked():
        for bits in lifted:
            counter.tick(max(1, len(trace.steps)))
            yield BitVector(r.width, bits)

    stream = SolutionStream(
        ticked(),
        counter,
        algorithm=algorithm,
        polynomial_delay="non-polynomial-delay" not in notes,
        notes=notes,
    )
    stream.reductions = trace.kinds()
    stream.clone = clone
    return stream
