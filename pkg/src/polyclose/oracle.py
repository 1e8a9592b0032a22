"""Ground-truth closure computation by saturation to a fixpoint.

Semantics are the naive ones: repeatedly apply every operation to all tuples
of the current set until nothing new appears.  Round internals are vectorized
(threshold operations via a capped zero-count dynamic program, binary and
staged ternary operations via deduplicated numpy grids) so the same fixpoint
is reached without enumerating arity-6 tuple spaces; results are identical to
literal tuple enumeration and deciders under test never share these paths.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .clones import OperationTable
from .core import Relation, mask_of


@dataclass(frozen=True)
class SaturationBudget:
    max_elements: int = 2_000_000
    max_rounds: int = 100_000

    def __post_init__(self):
        if self.max_elements <= 0 or self.max_rounds <= 0:
            raise ValueError("budget bounds must be positive")


DEFAULT_BUDGET = SaturationBudget()


class BudgetExhausted(RuntimeError):
    """Saturation exceeded its budget; carries the partial element list."""

    def __init__(self, message: str, partial):
        super().__init__(message)
        self.partial = partial


# --- recognizing fast operation shapes ---------------------------------------


def _threshold_of(op: OperationTable) -> int | None:
    """theta such that f(args) = [sum(args) >= theta], or None."""
    if op.domain_size != 2 or op.arity == 0:
        return None
    by_count: dict[int, int] = {}
    for idx, v in enumerate(op.table):
        c = idx.bit_count()
        if by_count.setdefault(c, v) != v:
            return None
    theta = None
    for c in range(op.arity + 1):
        if by_count[c] == 1:
            theta = c
            break
    if theta is None or theta == 0:
        return None
    if any(by_count[c] != (1 if c >= theta else 0) for c in range(op.arity + 1)):
        return None
    return theta


_BINARY_TABLES = list(itertools.product((0, 1), repeat=4))


def _apply_binary_int(table: tuple[int, ...], a: int, b: int, full: int) -> int:
    """Coordinatewise binary op on packed ints; table indexed by (a,b) big-endian."""
    out = 0
    if table[3]:
        out |= a & b
    if table[2]:
        out |= a & ~b
    if table[1]:
        out |= ~a & b
    if table[0]:
        out |= ~a & ~b
    return out & full


def _apply_binary_np(table, a, b, full):
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.uint64)
    if table[3]:
        out |= a & b
    if table[2]:
        out |= a & ~b
    if table[1]:
        out |= ~a & b
    if table[0]:
        out |= ~a & ~b
    return out & full


def _staged_split(op: OperationTable) -> tuple[tuple, tuple, tuple[int, int, int]] | None:
    """Decomposition f(x1,x2,x3) = g(x_i, h(x_j, x_k)) if one exists.

    Returns (g_table, h_table, (i, j, k)) with tables in big-endian 2-bit form.
    """
    if op.arity != 3 or op.domain_size != 2:
        return None
    for i, j, k in ((0, 1, 2), (1, 0, 2), (2, 0, 1)):
        def f(a, b, c):
            args = [0, 0, 0]
            args[i], args[j], args[k] = a, b, c
            return op.table[(args[0] << 2) | (args[1] << 1) | args[2]]

        for h in _BINARY_TABLES:
            for g in _BINARY_TABLES:
                if all(
                    f(a, b, c) == g[(a << 1) | h[(b << 1) | c]]
                    for a in (0, 1)
                    for b in (0, 1)
                    for c in (0, 1)
                ):
                    return g, h, (i, j, k)
    return None


def _separable_split(op: OperationTable) -> tuple[tuple, tuple, tuple[int, int, int]] | None:
    """Decomposition f = (beta(x_j) AND x_i) OR (gamma(x_k) AND NOT x_i).

    Covers if-then-else style tables: fixing the selector coordinate makes the
    two halves depend on one argument each.
    """
    if op.arity != 3 or op.domain_size != 2:
        return None
    unary = [(0, 0), (0, 1), (1, 0), (1, 1)]  # (f(0), f(1))
    for i in range(3):
        rest = [j for j in range(3) if j != i]
        for j, k in (rest, rest[::-1]):
            def f(sel, b, c):
                args = [0, 0, 0]
                args[i], args[j], args[k] = sel, b, c
                return op.table[(args[0] << 2) | (args[1] << 1) | args[2]]

            for beta in unary:
                for gamma in unary:
                    if all(
                        f(1, b, c) == beta[b] and f(0, b, c) == gamma[c]
                        for b in (0, 1)
                        for c in (0, 1)
                    ):
                        return beta, gamma, (i, j, k)
    return None


def _apply_unary_int(pair: tuple[int, int], a: int, full: int) -> int:
    f0, f1 = pair
    out = 0
    if f1:
        out |= a
    if f0:
        out |= ~a
    return out & full


# --- boolean round engines ----------------------------------------------------


def _round_threshold(theta: int, arity: int, elems: np.ndarray, width: int) -> set[int]:
    """All f(tuple) over tuples of elems for f = [sum >= theta], via a DP on
    per-coordinate zero counts clamped at zcap+1."""
    zcap = arity - theta
    bits = max((zcap + 2).bit_length(), 2)
    if width * bits > 62:
        raise _FallbackToPython()
    dmask = (1 << bits) - 1
    cap = zcap + 1
    digit_masks = [np.uint64(dmask << (bits * i)) for i in range(width)]
    caps = [np.uint64(cap << (bits * i)) for i in range(width)]

    zcodes = []
    for e in elems.tolist():
        code = 0
        for i in range(width):
            if not (e >> i) & 1:
                code |= 1 << (bits * i)
        zcodes.append(code)
    z = np.array(zcodes, dtype=np.uint64)

    states = np.zeros(1, dtype=np.uint64)
    for _ in range(arity):
        states = (states[:, None] + z[None, :]).ravel()
        for i in range(width):
            dm, cp = digit_masks[i], caps[i]
            over = (states & dm) > cp
            if over.any():
                states[over] = (states[over] & ~dm) | cp
        states = np.unique(states)
    result = np.zeros(len(states), dtype=np.uint64)
    for i in range(width):
        digit = (states >> np.uint64(bits * i)) & np.uint64(dmask)
        result |= (digit <= np.uint64(zcap)).astype(np.uint64) << np.uint64(i)
    return {int(x) for x in np.unique(result)}


class _FallbackToPython(Exception):
    pass


def _op_round_bool(op: OperationTable, elems: list[int], width: int) -> set[int]:
    """One application round of op over all tuples of elems (packed ints)."""
    full = mask_of(width)
    if op.is_constant():
        return {full if op.table[0] else 0}
    if op.arity == 1:
        pair = (op.table[0], op.table[1])
        return {_apply_unary_int(pair, e, full) for e in elems}

    theta = _threshold_of(op)
    use_np = width <= 62 and len(elems) > 1
    if theta is not None and use_np:
        try:
            return _round_threshold(theta, op.arity, np.array(elems, dtype=np.uint64), width)
        except _FallbackToPython:
            pass

    if op.arity == 2:
        if use_np:
            arr = np.array(elems, dtype=np.uint64)
            grid = _apply_binary_np(op.table, arr[:, None], arr[None, :], np.uint64(full))
            return {int(x) for x in np.unique(grid)}
        return {
            _apply_binary_int(op.table, a, b, full) for a in elems for b in elems
        }

    if op.arity == 3:
        staged = _staged_split(op)
        if staged is not None:
            g, h, (i, j, k) = staged
            if use_np:
                arr = np.array(elems, dtype=np.uint64)
                inner = np.unique(
                    _apply_binary_np(h, arr[:, None], arr[None, :], np.uint64(full))
                )
                outer = _apply_binary_np(g, arr[:, None], inner[None, :], np.uint64(full))
                return {int(x) for x in np.unique(outer)}
            inner = {_apply_binary_int(h, b, c, full) for b in elems for c in elems}
            return {_apply_binary_int(g, a, hv, full) for a in elems for hv in inner}
        sep = _separable_split(op)
        if sep is not None:
            beta, gamma, _perm = sep
            out: set[int] = set()
            if use_np:
                arr = np.array(elems, dtype=np.uint64)
                betas = _apply_unary_np(beta, arr, full)
                gammas = _apply_unary_np(gamma, arr, full)
                for a in elems:
                    u = np.unique(betas & np.uint64(a))
                    v = np.unique(gammas & np.uint64(full ^ a))
                    out.update(int(x) for x in np.unique(u[:, None] | v[None, :]))
                return out
            for a in elems:
                us = {_apply_unary_int(beta, b, full) & a for b in elems}
                vs = {_apply_unary_int(gamma, c, full) & (full ^ a) for c in elems}
                out.update(u | v for u in us for v in vs)
            return out

    # generic fallback: literal tuple enumeration
    out = set()
    t = op.arity
    for tup in itertools.product(elems, repeat=t):
        bits = 0
        for pos in range(width):
            idx = 0
            for a in tup:
                idx = (idx << 1) | ((a >> pos) & 1)
            bits |= op.table[idx] << pos
        out.add(bits)
    return out


def _apply_unary_np(pair, arr, full):
    out = np.zeros(arr.shape, dtype=np.uint64)
    if pair[1]:
        out |= arr
    if pair[0]:
        out |= ~arr
    return out & np.uint64(full)


# --- public saturation entry points -------------------------------------------


def saturate_masks(
    width: int,
    masks,
    ops,
    up=(),
    down=(),
    budget: SaturationBudget = DEFAULT_BUDGET,
) -> list[int]:
    """Closure of packed boolean vectors; returns elements in insertion order
    (seed order, then per round sorted ascending).
    """
    ops = list(ops)
    for op in ops:
        if op.domain_size != 2:
            raise ValueError("saturate_masks handles boolean tables only")
    up = tuple(up)
    down = tuple(down)
    elems: list[int] = []
    seen: set[int] = set()
    for m in masks:
        if m not in seen:
            seen.add(m)
            elems.append(m)
    rounds = 0
    while True:
        rounds += 1
        if rounds > budget.max_rounds:
            raise BudgetExhausted("round budget exhausted", elems)
        fresh: set[int] = set()
        for op in ops:
            fresh |= _op_round_bool(op, elems, width) - seen
        for i in up:
            bit = 1 << i
            fresh |= {e | bit for e in elems} - seen
        for i in down:
            bit = 1 << i
            fresh |= {e & ~bit for e in elems} - seen
        if not fresh:
            return elems
        for m in sorted(fresh):
            seen.add(m)
            elems.append(m)
        if len(elems) > budget.max_elements:
            raise BudgetExhausted(
                f"element budget {budget.max_elements} exhausted", elems
            )


def saturate(
    r: Relation,
    ops,
    ud=None,
    budget: SaturationBudget = DEFAULT_BUDGET,
) -> Relation:
    """Closure of a boolean relation under ops plus optional per-coordinate
    upward/downward operators (an object with .up/.down index iterables)."""
    up: tuple[int, ...] = ()
    down: tuple[int, ...] = ()
    if ud is not None:
        up = tuple(ud.up)
        down = tuple(ud.down)
    elems = saturate_masks(r.width, r.rows, ops, up=up, down=down, budget=budget)
    return Relation(r.width, elems)


def saturate_tuples(
    domain_size: int,
    rows,
    ops,
    budget: SaturationBudget = DEFAULT_BUDGET,
) -> list[tuple[int, ...]]:
    """Closure over an arbitrary finite domain; rows are digit tuples.

    Plain incremental tuple enumeration; meant for desk-scale instances.
    """
    ops = list(ops)
    for op in ops:
        if op.domain_size != domain_size:
            raise ValueError("operation domain size mismatch")
    elems: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for row in rows:
        t = tuple(row)
        if t not in seen:
            seen.add(t)
            elems.append(t)
    if not elems:
        return elems
    width = len(elems[0])
    frontier = list(elems)
    rounds = 0
    while frontier:
        rounds += 1
        if rounds > budget.max_rounds:
            raise BudgetExhausted("round budget exhausted", elems)
        fresh: set[tuple[int, ...]] = set()
        old_count = len(elems) - len(frontier)
        for op in ops:
            t = op.arity
            if t == 0:
                cand = tuple([op.table[0]] * width)
                if cand not in seen:
                    fresh.add(cand)
                continue
            # tuples having at least one frontier element
            for positions in itertools.product(range(2), repeat=t):
                if 1 not in positions:
                    continue
                pools = [frontier if p else elems[:old_count] for p in positions]
                for tup in itertools.product(*pools):
                    cand = tuple(
                        op.eval([v[i] for v in tup]) for i in range(width)
                    )
                    if cand not in seen:
                        fresh.add(cand)
        ordered = sorted(fresh)
        for t_ in ordered:
            seen.add(t_)
            elems.append(t_)
        if len(elems) > budget.max_elements:
            raise BudgetExhausted(
                f"element budget {budget.max_elements} exhausted", elems
            )
        frontier = ordered
    return elems


def is_closed(width: int, elems, ops, sample_limit: int | None = None) -> bool:
    """Check that applying each op to tuples of elems stays inside elems."""
    elems = list(elems)
    universe = set(elems)
    for op in ops:
        round_out = _op_round_bool(op, elems, width)
        if not round_out <= universe:
            return False
    return True
