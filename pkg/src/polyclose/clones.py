"""Operation tables, the reduced Post-lattice registry, and instance reductions.

An arity-t boolean operation is a table of 2^t output bits indexed by the
input tuple read as a big-endian integer (first argument most significant).
Classification identifies the clone generated by a finite op set inside the
full Post lattice via closure-property profiles, then maps that node to a
registry clone plus the constant/dual/negation folding steps that realize the
same closure on a transformed instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .core import (
    BitVector,
    FormatError,
    Relation,
    WidthMismatch,
    complement_rows,
    equal_column_classes,
    mask_of,
    project_bits,
    union_rows,
)


class UnsupportedDomain(ValueError):
    pass


class UnsupportedArity(ValueError):
    pass


@dataclass(frozen=True)
class OperationTable:
    """Finite operation f: D^t -> D as an explicit value table.

    table is indexed lexicographically by the input tuple: for boolean ops the
    index of (x1,..,xt) is x1*2^(t-1) + ... + xt.
    """

    arity: int
    domain_size: int
    table: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        if self.arity < 0 or self.domain_size < 2:
            raise ValueError("need arity >= 0 and domain size >= 2")
        if len(self.table) != self.domain_size**self.arity:
            raise ValueError("table length must be domain_size ** arity")
        if any(not 0 <= v < self.domain_size for v in self.table):
            raise ValueError("table values out of domain")

    @classmethod
    def from_function(
        cls, arity: int, domain_size: int, fn: Callable[..., int], name: str = ""
    ) -> "OperationTable":
        table = tuple(
            fn(*args) for args in itertools.product(range(domain_size), repeat=arity)
        )
        return cls(arity, domain_size, table, name)

    def eval(self, args: Sequence[int]) -> int:
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        idx = 0
        for a in args:
            if not 0 <= a < self.domain_size:
                raise ValueError(f"argument {a} out of domain [0,{self.domain_size})")
            idx = idx * self.domain_size + a
        return self.table[idx]

    def eval_vectors(self, args: Sequence[BitVector]) -> BitVector:
        """Coordinatewise extension to equal-width vectors (boolean only)."""
        if self.domain_size != 2:
            raise UnsupportedDomain("vector evaluation is for boolean tables")
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        if args:
            width = args[0].width
            for v in args:
                if v.width != width:
                    raise WidthMismatch("vector widths differ")
        else:
            raise ValueError("0-ary table needs an explicit width; use eval()")
        bits = 0
        for i in range(width):
            bits |= self.eval([v.get(i) for v in args]) << i
        return BitVector(width, bits)

    def is_constant(self) -> bool:
        return len(set(self.table)) == 1

    def __str__(self) -> str:
        return self.name or f"op{self.arity}/{self.domain_size}:{''.join(map(str, self.table))}"


def dualize(op: OperationTable) -> OperationTable:
    """f*(x1..xt) = not f(not x1, .., not xt); an involution on boolean tables."""
    if op.domain_size != 2:
        raise UnsupportedDomain("dualization is defined over the boolean domain")
    size = len(op.table)
    table = tuple(1 - op.table[size - 1 - i] for i in range(size))
    name = f"dual({op.name})" if op.name else ""
    return OperationTable(op.arity, 2, table, name)


# --- named boolean operations ----------------------------------------------


def _threshold(k: int, arity: int) -> OperationTable:
    return OperationTable.from_function(
        arity, 2, lambda *xs: 1 if sum(xs) >= k else 0, f"Th{k}^{arity}"
    )


OP_AND = OperationTable.from_function(2, 2, lambda x, y: x & y, "and")
OP_OR = OperationTable.from_function(2, 2, lambda x, y: x | y, "or")
OP_NOT = OperationTable.from_function(1, 2, lambda x: 1 - x, "not")
OP_XOR = OperationTable.from_function(2, 2, lambda x, y: x ^ y, "xor")
OP_EQ = OperationTable.from_function(2, 2, lambda x, y: 1 - (x ^ y), "eq")
OP_XOR3 = OperationTable.from_function(3, 2, lambda x, y, z: x ^ y ^ z, "xor3")
OP_NXOR3 = OperationTable.from_function(3, 2, lambda x, y, z: 1 ^ x ^ y ^ z, "nxor3")
OP_MAJ = OperationTable.from_function(
    3, 2, lambda x, y, z: (x & y) | (x & z) | (y & z), "maj"
)
OP_ITE = OperationTable.from_function(
    3, 2, lambda x, y, z: y if x else z, "ite"
)
OP_AND_OR = OperationTable.from_function(
    3, 2, lambda x, y, z: x & (y | z), "and-or"
)
OP_AND_IMP = OperationTable.from_function(
    3, 2, lambda x, y, z: x & ((1 - y) | z), "and-imp"
)
OP_AND_NOT = OperationTable.from_function(2, 2, lambda x, y: x & (1 - y), "andnot")
OP_CONST0 = OperationTable(0, 2, (0,), "const0")
OP_CONST1 = OperationTable(0, 2, (1,), "const1")


def threshold_op(k: int, arity: int) -> OperationTable:
    """Th_k over `arity` inputs: 1 iff at least k arguments are 1."""
    if not 1 <= k <= arity:
        raise ValueError("need 1 <= k <= arity")
    return _threshold(k, arity)


# --- clone identifiers and the Fig.-style registry --------------------------

_PLAIN_TAGS = ("I2", "E2", "L0", "L2", "M2", "BF", "R", "R0", "S10", "S12", "D2", "D1")
_K_TAGS = ("S10K", "S12K")


@dataclass(frozen=True)
class CloneId:
    tag: str
    k: int | None = None

    def __post_init__(self):
        if self.tag in _PLAIN_TAGS:
            if self.k is not None:
                raise ValueError(f"{self.tag} takes no level parameter")
        elif self.tag in _K_TAGS:
            if self.k is None or self.k < 2:
                raise ValueError(f"{self.tag} needs a level k >= 2")
        else:
            raise ValueError(f"unknown clone tag {self.tag!r}")

    def __str__(self) -> str:
        if self.k is not None:
            return f"{self.tag[:-1]}^{self.k}"
        return self.tag

    @classmethod
    def parse(cls, name: str) -> "CloneId":
        name = name.strip()
        up = name.upper()
        if up in _PLAIN_TAGS:
            return cls(up)
        for tag in _K_TAGS:
            prefix = tag[:-1]  # S10 / S12
            for sep in ("^", "K", "k"):
                if up.startswith(prefix + sep):
                    rest = up[len(prefix) + 1 :]
                    if rest.isdigit():
                        return cls(tag, int(rest))
        raise ValueError(f"unknown clone name {name!r}")


UNCLASSIFIED = "Unclassified"


def clone_base(clone: CloneId) -> tuple[OperationTable, ...]:
    """Generating operations of a registry clone (the lattice table's base)."""
    tag, k = clone.tag, clone.k
    if tag == "I2":
        return ()
    if tag == "E2":
        return (OP_AND,)
    if tag == "L0":
        return (OP_XOR,)
    if tag == "L2":
        return (OP_XOR3,)
    if tag == "M2":
        return (OP_OR, OP_AND)
    if tag == "BF":
        return (OP_OR, OP_NOT)
    if tag == "R":
        return (OP_ITE,)
    if tag == "R0":
        return (OP_OR, OP_XOR)
    if tag == "S10":
        return (OP_AND_OR,)
    if tag == "S12":
        return (OP_AND_IMP,)
    if tag == "D2":
        return (OP_MAJ,)
    if tag == "D1":
        return (OP_MAJ, OP_XOR3)
    if tag == "S10K":
        if k == 2:
            return (OP_MAJ, OP_AND_OR)
        return (threshold_op(k, k + 1),)
    if tag == "S12K":
        if k == 2:
            return (OP_MAJ, OP_AND_IMP)
        return (threshold_op(k, k + 1), OP_AND_IMP)
    raise ValueError(tag)


def registry_clones(k_max: int = 5) -> list[CloneId]:
    out = [CloneId(t) for t in _PLAIN_TAGS]
    for k in range(2, k_max + 1):
        out.append(CloneId("S10K", k))
        out.append(CloneId("S12K", k))
    return out


# --- closure-property profile of a boolean operation ------------------------


def _ones_inputs(op: OperationTable) -> list[int]:
    t = op.arity
    return [i for i, v in enumerate(op.table) if v == 1]


def preserves_zero(op: OperationTable) -> bool:
    return op.table[0] == 0


def preserves_one(op: OperationTable) -> bool:
    return op.table[-1] == 1


def is_monotone(op: OperationTable) -> bool:
    t = op.arity
    for x in range(1 << t):
        fx = op.table[x]
        for i in range(t):
            if not (x >> i) & 1:
                if fx > op.table[x | (1 << i)]:
                    return False
    return True


def is_selfdual(op: OperationTable) -> bool:
    size = len(op.table)
    return all(op.table[i] == 1 - op.table[size - 1 - i] for i in range(size))


def anf_coefficients(op: OperationTable) -> list[int]:
    """Moebius transform; coeff[m] is the ANF coefficient of monomial m.

    Input index convention: bit (t-1-i) of the table index is argument i, so
    monomial masks use the same convention; only degrees matter here.
    """
    coeff = list(op.table)
    n = op.arity
    for i in range(n):
        step = 1 << i
        for x in range(len(coeff)):
            if x & step:
                coeff[x] ^= coeff[x ^ step]
    return coeff


def is_affine(op: OperationTable) -> bool:
    return all(
        c == 0 for m, c in enumerate(anf_coefficients(op)) if m.bit_count() >= 2
    )


def _min_empty_intersection(masks: list[int], t: int) -> int | None:
    """Smallest count of masks whose AND is 0 (None if the AND of all isn't 0).

    BFS over reachable AND-values; state space is at most 2^t.
    """
    full = mask_of(t)
    acc_all = full
    for m in masks:
        acc_all &= m
    if acc_all != 0 or t == 0:
        return None
    best = {full: 0}
    frontier = [full]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for state in frontier:
            for m in masks:
                s2 = state & m
                if s2 == 0:
                    return depth
                if s2 not in best:
                    best[s2] = depth
                    nxt.append(s2)
        frontier = nxt
    return None


def separation_degree(op: OperationTable, value: int) -> float:
    """Largest k such that every <=k-subset of f^-1(value) shares a coordinate
    equal to `value`; inf when the whole preimage does.
    """
    t = op.arity
    if value == 1:
        masks = _ones_inputs(op)
    else:
        masks = [i ^ mask_of(t) for i, v in enumerate(op.table) if v == 0]
    if not masks:
        return float("inf")
    smallest = _min_empty_intersection(masks, t)
    if smallest is None:
        return float("inf")
    return smallest - 1


def _conjunction_target(op: OperationTable) -> int | None:
    """T such that f(x) = [x >= chi_T], or None; T == 0 means the constant 1."""
    ones = _ones_inputs(op)
    if not ones:
        return None
    target = mask_of(op.arity)
    for x in ones:
        target &= x
    for x in range(1 << op.arity):
        want = 1 if x & target == target else 0
        if op.table[x] != want:
            return None
    return target


def _disjunction_sources(op: OperationTable) -> tuple[int, int] | None:
    """(T, c) with f(x) = c OR [x intersects chi_T], or None."""
    t = op.arity
    c = op.table[0]
    members = 0
    for i in range(t):
        if op.table[1 << (t - 1 - i)] == 1:
            members |= 1 << (t - 1 - i)
    for x in range(1 << t):
        want = 1 if (c or (x & members)) else 0
        if op.table[x] != want:
            return None
    return members, c


def _unary_shape(op: OperationTable) -> str | None:
    """'proj', 'neg', 'const0', 'const1' when f is essentially unary."""
    if op.is_constant():
        return "const1" if op.table[0] == 1 else "const0"
    t = op.arity
    for i in range(t):
        bit = 1 << (t - 1 - i)
        if all(op.table[x] == (1 if x & bit else 0) for x in range(1 << t)):
            return "proj"
        if all(op.table[x] == (0 if x & bit else 1) for x in range(1 << t)):
            return "neg"
    return None


@dataclass(frozen=True)
class OpProfile:
    p0: bool
    p1: bool
    mono: bool
    selfdual: bool
    affine: bool
    sep1: float
    sep0: float
    conj: bool  # nonempty conjunction of variables
    conj_or_c0: bool
    conj_or_c1: bool
    conj_or_const: bool
    disj: bool
    disj_or_c0: bool
    disj_or_c1: bool
    disj_or_const: bool
    unary: str | None


def profile(op: OperationTable) -> OpProfile:
    if op.domain_size != 2:
        raise UnsupportedDomain("profiles are defined over the boolean domain")
    conj_t = _conjunction_target(op)
    disj = _disjunction_sources(op)
    const = op.is_constant()
    c0 = const and op.table[0] == 0
    c1 = const and op.table[0] == 1
    conj = conj_t is not None and conj_t != 0
    is_disj = disj is not None and disj[0] != 0 and disj[1] == 0
    return OpProfile(
        p0=preserves_zero(op),
        p1=preserves_one(op),
        mono=is_monotone(op),
        selfdual=is_selfdual(op),
        affine=is_affine(op),
        sep1=separation_degree(op, 1),
        sep0=separation_degree(op, 0),
        conj=conj,
        conj_or_c0=conj or c0,
        conj_or_c1=conj or c1,
        conj_or_const=conj or const,
        disj=is_disj,
        disj_or_c0=is_disj or c0,
        disj_or_c1=is_disj or c1,
        disj_or_const=is_disj or const,
        unary=_unary_shape(op),
    )


# --- full Post lattice nodes ------------------------------------------------

INF = float("inf")


@dataclass(frozen=True)
class _Node:
    name: str
    pred: Callable[[OpProfile], bool]
    base: tuple[OperationTable, ...]
    target: CloneId
    steps: tuple[str, ...]  # step names applied in order before enumeration


def _nodes(k_max: int) -> list[_Node]:
    n: list[_Node] = []

    def add(name, pred, base, target, steps=()):
        n.append(_Node(name, pred, tuple(base), target, tuple(steps)))

    c = CloneId
    add("BF", lambda p: True, [OP_OR, OP_NOT], c("BF"))
    add("R0", lambda p: p.p0, [OP_OR, OP_XOR], c("R0"))
    add("R1", lambda p: p.p1, [OP_AND, OP_EQ], c("R0"), ["Dualize"])
    add("R2", lambda p: p.p0 and p.p1, [OP_ITE], c("R"))
    add("M", lambda p: p.mono, [OP_OR, OP_AND, OP_CONST0, OP_CONST1], c("M2"),
        ["AddConstant0", "AddConstant1"])
    add("M0", lambda p: p.mono and p.p0, [OP_OR, OP_AND, OP_CONST0], c("M2"),
        ["AddConstant0"])
    add("M1", lambda p: p.mono and p.p1, [OP_OR, OP_AND, OP_CONST1], c("M2"),
        ["AddConstant1"])
    add("M2", lambda p: p.mono and p.p0 and p.p1, [OP_OR, OP_AND], c("M2"))
    dual_maj = OperationTable.from_function(
        3, 2, lambda x, y, z: (x & (1 - y)) | (x & (1 - z)) | ((1 - y) & (1 - z)),
        "maj(x,!y,!z)",
    )
    add("D", lambda p: p.selfdual, [dual_maj], c("D1"), ["FoldNegation"])
    add("D1", lambda p: p.selfdual and p.p0 and p.p1, [OP_MAJ, OP_XOR3], c("D1"))
    add("D2", lambda p: p.selfdual and p.mono, [OP_MAJ], c("D2"))
    add("L", lambda p: p.affine, [OP_XOR, OP_CONST1], c("L0"), ["AddConstant1"])
    add("L0", lambda p: p.affine and p.p0, [OP_XOR], c("L0"))
    add("L1", lambda p: p.affine and p.p1, [OP_EQ], c("L0"), ["Dualize"])
    add("L2", lambda p: p.affine and p.p0 and p.p1, [OP_XOR3], c("L2"))
    add("L3", lambda p: p.affine and p.selfdual, [OP_NXOR3], c("L2"), ["FoldNegation"])

    # 1-separating family and its monotone / 0,1-preserving refinements
    add("S1", lambda p: p.sep1 == INF, [OP_AND_NOT], c("S12"), ["AddConstant0"])
    add("S12", lambda p: p.sep1 == INF and p.p1, [OP_AND_IMP], c("S12"))
    add("S11", lambda p: p.sep1 == INF and p.mono, [OP_AND_OR, OP_CONST0],
        c("S10"), ["AddConstant0"])
    add("S10", lambda p: p.sep1 == INF and p.mono and p.p1, [OP_AND_OR], c("S10"))
    for k in range(2, k_max + 1):
        th = threshold_op(k, k + 1) if k >= 3 else OP_MAJ
        base10 = [th, OP_AND_OR] if k == 2 else [th]
        add(f"S1^{k}", lambda p, k=k: p.sep1 >= k,
            [th, OP_AND_NOT], c("S12K", k), ["AddConstant0"])
        add(f"S12^{k}", lambda p, k=k: p.sep1 >= k and p.p1,
            [th, OP_AND_IMP], c("S12K", k))
        add(f"S11^{k}", lambda p, k=k: p.sep1 >= k and p.mono,
            [th, OP_AND_OR, OP_CONST0], c("S10K", k), ["AddConstant0"])
        add(f"S10^{k}", lambda p, k=k: p.sep1 >= k and p.mono and p.p1,
            base10, c("S10K", k))

    # 0-separating family: duals of the S1 family
    add("S0", lambda p: p.sep0 == INF, [dualize(OP_AND_NOT)], c("S12"),
        ["Dualize", "AddConstant0"])
    add("S02", lambda p: p.sep0 == INF and p.p0, [dualize(OP_AND_IMP)],
        c("S12"), ["Dualize"])
    add("S01", lambda p: p.sep0 == INF and p.mono,
        [dualize(OP_AND_OR), OP_CONST1], c("S10"), ["Dualize", "AddConstant0"])
    add("S00", lambda p: p.sep0 == INF and p.mono and p.p0,
        [dualize(OP_AND_OR)], c("S10"), ["Dualize"])
    for k in range(2, k_max + 1):
        th = dualize(threshold_op(k, k + 1)) if k >= 3 else OP_MAJ
        base00 = [th, dualize(OP_AND_OR)] if k == 2 else [th]
        add(f"S0^{k}", lambda p, k=k: p.sep0 >= k,
            [th, dualize(OP_AND_NOT)], c("S12K", k), ["Dualize", "AddConstant0"])
        add(f"S02^{k}", lambda p, k=k: p.sep0 >= k and p.p0,
            [th, dualize(OP_AND_IMP)], c("S12K", k), ["Dualize"])
        add(f"S01^{k}", lambda p, k=k: p.sep0 >= k and p.mono,
            [th, dualize(OP_AND_OR), OP_CONST1],
            c("S10K", k), ["Dualize", "AddConstant0"])
        add(f"S00^{k}", lambda p, k=k: p.sep0 >= k and p.mono and p.p0,
            base00, c("S10K", k), ["Dualize"])

    add("V", lambda p: p.disj_or_const, [OP_OR, OP_CONST0, OP_CONST1], c("E2"),
        ["AddConstant0", "AddConstant1", "Dualize"])
    add("V0", lambda p: p.disj_or_c0, [OP_OR, OP_CONST0], c("E2"),
        ["AddConstant0", "Dualize"])
    add("V1", lambda p: p.disj_or_c1, [OP_OR, OP_CONST1], c("E2"),
        ["AddConstant1", "Dualize"])
    add("V2", lambda p: p.disj, [OP_OR], c("E2"), ["Dualize"])
    add("E", lambda p: p.conj_or_const, [OP_AND, OP_CONST0, OP_CONST1], c("E2"),
        ["AddConstant0", "AddConstant1"])
    add("E0", lambda p: p.conj_or_c0, [OP_AND, OP_CONST0], c("E2"), ["AddConstant0"])
    add("E1", lambda p: p.conj_or_c1, [OP_AND, OP_CONST1], c("E2"), ["AddConstant1"])
    add("E2", lambda p: p.conj, [OP_AND], c("E2"))
    add("N", lambda p: p.unary is not None, [OP_NOT, OP_CONST0], c("I2"),
        ["AddConstant0", "AddConstant1", "FoldNegation"])
    add("N2", lambda p: p.unary in ("proj", "neg"), [OP_NOT], c("I2"),
        ["FoldNegation"])
    add("I", lambda p: p.unary in ("proj", "const0", "const1"),
        [OP_CONST0, OP_CONST1], c("I2"), ["AddConstant0", "AddConstant1"])
    add("I0", lambda p: p.unary in ("proj", "const0"), [OP_CONST0], c("I2"),
        ["AddConstant0"])
    add("I1", lambda p: p.unary in ("proj", "const1"), [OP_CONST1], c("I2"),
        ["AddConstant1"])
    add("I2", lambda p: p.unary == "proj", [], c("I2"))
    return n


class CloneAnalysis:
    """Result of identifying <ops>: registry clone plus instance-level steps."""

    def __init__(self, node: str, clone: CloneId, steps: tuple[str, ...]):
        self.node = node
        self.clone = clone
        self.steps = steps

    def __repr__(self):
        return f"CloneAnalysis(node={self.node}, clone={self.clone}, steps={self.steps})"


def analyze_ops(
    ops: Iterable[OperationTable], a_max: int = 4, k_max: int = 5
) -> CloneAnalysis | None:
    """Identify the full-lattice clone generated by ops; None if out of bounds."""
    ops = list(ops)
    for op in ops:
        if op.domain_size != 2:
            raise UnsupportedDomain("classification is defined over booleans")
        if op.arity > a_max:
            raise UnsupportedArity(
                f"operation arity {op.arity} exceeds the bound {a_max}; "
                "name the clone explicitly"
            )
    profiles = [profile(op) for op in ops]
    nodes = _nodes(k_max)
    by_name = {nd.name: nd for nd in nodes}
    containing = [nd for nd in nodes if all(nd.pred(p) for p in profiles)]
    # A finite separation level beyond k_max means the generated clone sits
    # strictly below every S^k node we model; no registry clone equals it.
    for attr in ("sep1", "sep0"):
        joint = min((getattr(p, attr) for p in profiles), default=INF)
        if k_max < joint < INF:
            return None
    minimal = []
    for nd in containing:
        leq_all = True
        for other in containing:
            if other is nd:
                continue
            if not all(other.pred(profile(g)) for g in nd.base):
                leq_all = False
                break
        if leq_all:
            minimal.append(nd)
    if len(minimal) != 1:
        return None
    nd = minimal[0]
    return CloneAnalysis(nd.name, nd.target, nd.steps)


def classify(
    ops: Iterable[OperationTable], a_max: int = 4, k_max: int = 5
) -> CloneId | str:
    """Registry clone whose closure semantics (after the constant/dual/negation
    equivalences) equal those of <ops>; UNCLASSIFIED when out of bounds.
    """
    ops = list(ops)
    constants = [op for op in ops if op.is_constant()]
    rest = [op for op in ops if not op.is_constant()]
    for op in constants:
        if op.domain_size != 2:
            raise UnsupportedDomain("classification is defined over booleans")
    if not rest:
        return CloneId("I2")
    res = analyze_ops(rest, a_max=a_max, k_max=k_max)
    if res is None:
        return UNCLASSIFIED
    return res.clone


# --- reduction traces --------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    """One instance transformation; `kind` decides the lift semantics.

    kinds: AddConstant0 | AddConstant1 | Dualize | FoldNegation
         | MergeEqualColumns (payload: partition, tuple of coordinate tuples)
         | DropFreeColumn (payload: coordinate, in the step's input width)
         | DropConstantColumn (payload: (coordinate, value))
    """

    kind: str
    payload: object = None

    def apply(self, r: Relation) -> Relation:
        k = self.kind
        if k == "AddConstant0":
            return Relation(r.width, list(r.rows) + [0])
        if k == "AddConstant1":
            return Relation(r.width, list(r.rows) + [mask_of(r.width)])
        if k == "Dualize":
            return complement_rows(r)
        if k == "FoldNegation":
            return union_rows(r, complement_rows(r))
        if k == "MergeEqualColumns":
            reps = [cls[0] for cls in self.payload]
            return Relation(len(reps), (project_bits(row, reps) for row in r.rows))
        if k == "DropFreeColumn":
            i = self.payload
            keep = [j for j in range(r.width) if j != i]
            return Relation(r.width - 1, (project_bits(row, keep) for row in r.rows))
        if k == "DropConstantColumn":
            i, _value = self.payload
            keep = [j for j in range(r.width) if j != i]
            return Relation(r.width - 1, (project_bits(row, keep) for row in r.rows))
        raise ValueError(f"unknown step kind {k!r}")

    def lift(self, solutions: Iterable[int], out_width: int):
        """Map reduced-instance solutions back; yields (bits, width) pairs."""
        k = self.kind
        if k in ("AddConstant0", "AddConstant1", "FoldNegation"):
            yield from solutions
        elif k == "Dualize":
            full = mask_of(out_width)
            for s in solutions:
                yield s ^ full
        elif k == "MergeEqualColumns":
            classes = self.payload
            for s in solutions:
                bits = 0
                for pos, cls in enumerate(classes):
                    if (s >> pos) & 1:
                        for i in cls:
                            bits |= 1 << i
                yield bits
        elif k == "DropFreeColumn":
            i = self.payload
            low = (1 << i) - 1
            for s in solutions:
                stretched = (s & low) | ((s >> i) << (i + 1))
                yield stretched
                yield stretched | (1 << i)
        elif k == "DropConstantColumn":
            i, value = self.payload
            low = (1 << i) - 1
            for s in solutions:
                stretched = (s & low) | ((s >> i) << (i + 1))
                yield stretched | (value << i)
        else:
            raise ValueError(f"unknown step kind {k!r}")

    def output_width(self, in_width: int) -> int:
        if self.kind == "MergeEqualColumns":
            return len(self.payload)
        if self.kind in ("DropFreeColumn", "DropConstantColumn"):
            return in_width - 1
        return in_width


class ReductionTrace:
    """Ordered steps from the original instance to the reduced one."""

    def __init__(self, original_width: int, steps: Sequence[TraceStep] = ()):
        self.original_width = original_width
        self.steps: list[TraceStep] = list(steps)
        self._widths = [original_width]
        for s in self.steps:
            self._widths.append(s.output_width(self._widths[-1]))

    def push(self, step: TraceStep):
        self.steps.append(step)
        self._widths.append(step.output_width(self._widths[-1]))

    @property
    def reduced_width(self) -> int:
        return self._widths[-1]

    def kinds(self) -> list[str]:
        return [s.kind for s in self.steps]

    def lift_bits(self, solutions: Iterable[int]):
        """Lift packed reduced solutions to packed original-width solutions."""
        stream = solutions
        for step, width_in in zip(reversed(self.steps), reversed(self._widths[:-1])):
            stream = step.lift(stream, width_in)
        return stream

    def lift_vectors(self, solutions: Iterable[BitVector]):
        bits = (v.bits for v in solutions)
        for out in self.lift_bits(bits):
            yield BitVector(self.original_width, out)


def _constant_column_rules(clone: CloneId, r: Relation) -> list[tuple[int, int]]:
    """(coordinate, value) pairs a clone-specific rule certifies as constant.

    R preserves both constants, R0 only 0; other registry enumerators handle
    constant columns natively.
    """
    out = []
    if clone.tag == "R":
        values = (0, 1)
    elif clone.tag == "R0":
        values = (0,)
    else:
        return out
    full_rows = mask_of(r.m)
    for i, col in enumerate(r.columns):
        if col == 0 and 0 in values:
            out.append((i, 0))
        elif col == full_rows and 1 in values:
            out.append((i, 1))
    return out


def reduce_instance(
    clone_or_ops, r: Relation, a_max: int = 4, k_max: int = 5
) -> tuple[CloneId | str, Relation, ReductionTrace]:
    """Normalize (clone, instance) to a registry clone and reduced instance.

    Applies, in order: constant folding (explicit constant operations become
    rows), dualization / negation folding as dictated by the clone analysis,
    equal-column merging, and clone-certified constant-column drops.  The
    returned trace lifts reduced solutions back bijectively.
    """
    if r.m == 0:
        raise ValueError("reduce_instance requires a nonempty relation")
    trace = ReductionTrace(r.width)

    def apply(kind: str, payload=None):
        nonlocal r
        step = TraceStep(kind, payload)
        r = step.apply(r)
        trace.push(step)

    if isinstance(clone_or_ops, CloneId):
        clone: CloneId | str = clone_or_ops
    elif isinstance(clone_or_ops, str):
        clone = CloneId.parse(clone_or_ops)
    else:
        ops = list(clone_or_ops)
        constants = [op for op in ops if op.is_constant()]
        rest = [op for op in ops if not op.is_constant()]
        for op in sorted(constants, key=lambda o: o.table[0]):
            apply("AddConstant1" if op.table[0] == 1 else "AddConstant0")
        if not rest:
            clone = CloneId("I2")
        else:
            res = analyze_ops(rest, a_max=a_max, k_max=k_max)
            if res is None:
                return UNCLASSIFIED, r, trace
            for kind in res.steps:
                apply(kind)
            clone = res.clone

    if isinstance(clone, CloneId) and r.m >= 1:
        classes = equal_column_classes(r)
        if len(classes) < r.width:
            apply("MergeEqualColumns", tuple(classes))
        for i, value in sorted(_constant_column_rules(clone, r), reverse=True):
            apply("DropConstantColumn", (i, value))
    return clone, r, trace


# --- truth-table text format -------------------------------------------------


def parse_operation(text: str) -> OperationTable:
    """Parse the 't d' + digit-line table format."""
    lines = [
        (no, ln.strip())
        for no, ln in enumerate(text.splitlines(), 1)
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if len(lines) != 2:
        raise FormatError("expected a 't d' header line and one table line")
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise FormatError("header must be 't d'", no)
    try:
        t, d = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError("header fields must be integers", no) from None
    no, row = lines[1]
    if len(row) != d**t:
        raise FormatError(f"table needs {d ** t} digits, found {len(row)}", no)
    try:
        table = tuple(int(ch) for ch in row)
    except ValueError:
        raise FormatError("table must be digits", no) from None
    return OperationTable(t, d, table)


def format_operation(op: OperationTable) -> str:
    return f"{op.arity} {op.domain_size}\n{''.join(str(v) for v in op.table)}\n"
