"""Command-line interface: membership, enumeration, extremal elements,
classification, the saturation oracle, and instance generators.

Solutions stream one digit string per line, unbuffered per line; --stats
appends '#'-prefixed report lines.  Exit codes: 0 success or true verdict,
1 false verdict, 2 usage or format errors, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from dataclasses import dataclass, field

from .clones import (
    UNCLASSIFIED,
    CloneId,
    classify,
    parse_operation,
)
from .core import BitVector, FormatError, Relation, parse_domain_rows, parse_relation
from .enumeration import enumerate_closure
from .extremal import closure_to_hypergraph, extremal_stream, format_hypergraph
from .formulas import format_dimacs, mondnf_to_e2_instance, parse_dimacs
from .membership import extension as extension_test
from .membership import member as member_test
from .multidomain import (
    DomainRelation,
    DomainVector,
    detect_near_unanimity,
    enum_assoc,
    enum_nu,
    format_domain_relation,
    member_nu,
)
from .oracle import BudgetExhausted, SaturationBudget, saturate_masks, saturate_tuples
from .streams import SolutionStream
from .udclosure import UDSpec, enum_ud, member_ud


@dataclass
class RunReport:
    solutions: int = 0
    wall_seconds: float = 0.0
    max_delay_ops: int = 0
    algorithm: str = ""
    reductions: list = field(default_factory=list)
    notes: tuple = ()

    def lines(self):
        yield f"# solutions: {self.solutions}"
        yield f"# wall-seconds: {self.wall_seconds:.6f}"
        yield f"# max-delay-ops: {self.max_delay_ops}"
        yield f"# algorithm: {self.algorithm}"
        if self.reductions:
            yield f"# reductions: {','.join(self.reductions)}"
        if self.notes:
            yield f"# notes: {','.join(self.notes)}"


def _budget() -> SaturationBudget:
    cap = os.environ.get("CLOSURE_BUDGET")
    if cap:
        return SaturationBudget(max_elements=int(cap))
    return SaturationBudget()


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None


def _load_relation(path: str) -> Relation:
    return parse_relation(_read(path))


def _load_domain_relation(path: str) -> DomainRelation:
    n, d, rows = parse_domain_rows(_read(path))
    return DomainRelation(n, d, rows)


def _load_ops(paths):
    return [parse_operation(_read(p)) for p in paths]


def _parse_indices(text: str, width: int):
    if not text:
        return ()
    out = []
    for tok in text.split(","):
        i = int(tok)
        if not 1 <= i <= width:
            raise FormatError(f"coordinate {i} out of range 1..{width}")
        out.append(i - 1)
    return tuple(out)


def _ud_from_args(args, width: int) -> UDSpec:
    return UDSpec.of(
        width,
        _parse_indices(getattr(args, "up", "") or "", width),
        _parse_indices(getattr(args, "down", "") or "", width),
    )


def _emit_stream(stream, limit, stats: bool, started: float) -> int:
    count = 0
    for v in stream:
        print(v, flush=True)
        count += 1
        if limit is not None and count >= limit:
            break
    if stats:
        report = RunReport(
            solutions=count,
            wall_seconds=time.perf_counter() - started,
            max_delay_ops=stream.max_delay_ops,
            algorithm=stream.algorithm,
            reductions=list(getattr(stream, "reductions", [])),
            notes=stream.notes,
        )
        for line in report.lines():
            print(line, flush=True)
    return 0


def _cmd_member(args) -> int:
    r = _load_relation(args.input)
    v = BitVector.from_string(args.vector)
    clone = CloneId.parse(args.clone)
    ud = _ud_from_args(args, r.width)
    if ud.is_empty():
        verdict = member_test(clone, r, v, budget=_budget())
    else:
        verdict = member_ud(clone, r, ud, v, budget=_budget())
    print("true" if verdict else "false", flush=True)
    return 0 if verdict else 1


def _cmd_extension(args) -> int:
    r = _load_relation(args.input)
    prefix = BitVector.from_string(args.prefix) if args.prefix else BitVector(0, 0)
    clone = CloneId.parse(args.clone)
    verdict = extension_test(clone, r, prefix, budget=_budget())
    print("true" if verdict else "false", flush=True)
    return 0 if verdict else 1


def _cmd_enumerate(args) -> int:
    started = time.perf_counter()
    budget = _budget()
    if args.op:
        op = parse_operation(_read(args.op))
        r = _load_domain_relation(args.input)
        if op.arity == 2:
            stream = enum_assoc(op, r)
        elif detect_near_unanimity(op):
            stream = enum_nu([op], r, budget=budget)
        else:
            raise FormatError("--op table must be binary associative or near-unanimity")
        return _emit_stream(stream, args.limit, args.stats, started)
    r = _load_relation(args.input)
    ud = _ud_from_args(args, r.width)
    if args.clone:
        clone = CloneId.parse(args.clone)
        if ud.is_empty():
            stream = enumerate_closure(clone, r, budget=budget)
        else:
            stream = enum_ud(clone, r, ud, budget=budget)
    else:
        ops = _load_ops(args.ops or [])
        if not ud.is_empty():
            clone = classify(ops)
            if clone == UNCLASSIFIED:
                raise FormatError("cannot classify the given operations")
            stream = enum_ud(clone, r, ud, budget=budget)
        else:
            stream = enumerate_closure(ops, r, budget=budget)
    if args.sorted:
        collected = sorted(str(v) for v in stream)
        for line in collected[: args.limit]:
            print(line, flush=True)
        if args.stats:
            report = RunReport(
                solutions=len(collected),
                wall_seconds=time.perf_counter() - started,
                max_delay_ops=stream.max_delay_ops,
                algorithm=stream.algorithm + "+sort",
                reductions=list(getattr(stream, "reductions", [])),
                notes=stream.notes,
            )
            for line in report.lines():
                print(line, flush=True)
        return 0
    return _emit_stream(stream, args.limit, args.stats, started)


def _cmd_extremal(args) -> int:
    started = time.perf_counter()
    r = _load_relation(args.input)
    clone = CloneId.parse(args.clone)
    stream = extremal_stream(clone, r, args.side, budget=_budget())
    return _emit_stream(stream, args.limit, args.stats, started)


def _cmd_classify(args) -> int:
    ops = _load_ops(args.ops)
    result = classify(ops)
    print(result if isinstance(result, str) else str(result), flush=True)
    return 0


def _cmd_oracle(args) -> int:
    started = time.perf_counter()
    budget = _budget()
    if args.ops:
        ops = _load_ops(args.ops)
    else:
        from .clones import clone_base

        ops = list(clone_base(CloneId.parse(args.clone)))
    header = _read(args.input)
    n, d, rows = parse_domain_rows(header)
    up = _parse_indices(args.up or "", n)
    down = _parse_indices(args.down or "", n)
    count = 0
    if d == 2:
        packed = []
        for digits in rows:
            bits = 0
            for i, x in enumerate(digits):
                if x:
                    bits |= 1 << i
            packed.append(bits)
        elems = saturate_masks(n, packed, ops, up=up, down=down, budget=budget)
        for e in elems:
            print(BitVector(n, e), flush=True)
            count += 1
            if args.limit is not None and count >= args.limit:
                break
    else:
        if up or down:
            raise FormatError("coordinate operators are boolean-only")
        elems = saturate_tuples(d, rows, ops, budget=budget)
        for e in elems:
            print("".join(str(x) for x in e), flush=True)
            count += 1
            if args.limit is not None and count >= args.limit:
                break
    if args.stats:
        print(f"# solutions: {count}", flush=True)
        print(f"# wall-seconds: {time.perf_counter() - started:.6f}", flush=True)
        print("# algorithm: saturation", flush=True)
    return 0


def _cmd_gen(args) -> int:
    kind = args.generator
    if kind == "mondnf":
        if args.input:
            _k, n, clauses = parse_dimacs(_read(args.input), expect="dnf")
            terms = [frozenset(c) for c in clauses]
            if any(not all(pos for _v, pos in t) for t in terms):
                raise FormatError("mondnf terms must be positive")
            rel = mondnf_to_e2_instance(terms, n)
            sys.stdout.write(
                "\n".join(
                    [f"{rel.width} {rel.m} 2"]
                    + [str(BitVector(rel.width, row)) for row in rel.rows]
                )
                + "\n"
            )
            return 0
        rng = random.Random(args.seed)
        n, m = args.vars, args.terms
        terms = []
        for _ in range(m):
            size = rng.randint(1, min(args.max_width, n))
            term = frozenset((v, True) for v in rng.sample(range(n), size))
            terms.append(term)
        sys.stdout.write(format_dimacs("dnf", n, terms))
        return 0
    if kind == "2cnf":
        r = _load_relation(args.input)
        from .formulas import build_phi_d2

        clauses = build_phi_d2(r)
        sys.stdout.write(format_dimacs("cnf", r.width, clauses))
        return 0
    if kind == "hypergraph":
        r = _load_relation(args.input)
        sys.stdout.write(format_hypergraph(closure_to_hypergraph(r, args.k)))
        return 0
    if kind == "x3c":
        from .multidomain import encode_exact3cover

        triples = []
        for chunk in (args.triples or "").split(";"):
            chunk = chunk.strip()
            if chunk:
                triples.append(tuple(int(t) - 1 for t in chunk.split(",")))
        rel, op, target = encode_exact3cover(args.universe, triples)
        sys.stdout.write(format_domain_relation(rel))
        sys.stdout.write(f"# op {op.name}\n# target {target}\n")
        return 0
    raise FormatError(f"unknown generator {kind!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polyclose",
        description="closure engine for coordinatewise boolean operations",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, ud=True):
        sp.add_argument("--input", required=True, help="relation file (n m d header)")
        if ud:
            sp.add_argument("--up", default="", help="1-based raised coordinates, comma separated")
            sp.add_argument("--down", default="", help="1-based cleared coordinates")

    sp = sub.add_parser("member", help="decide closure membership")
    sp.add_argument("--clone", required=True)
    common(sp)
    sp.add_argument("--vector", required=True)
    sp.set_defaults(fn=_cmd_member)

    sp = sub.add_parser("extension", help="decide prefix extendability")
    sp.add_argument("--clone", required=True)
    common(sp, ud=False)
    sp.add_argument("--prefix", default="")
    sp.set_defaults(fn=_cmd_extension)

    sp = sub.add_parser("enumerate", help="stream the closure")
    sp.add_argument("--clone")
    sp.add_argument("--ops", nargs="*", help="operation table files")
    sp.add_argument("--op", help="single table: associative or near-unanimity path")
    common(sp)
    sp.add_argument("--limit", type=int)
    sp.add_argument("--stats", action="store_true")
    sp.add_argument("--sorted", action="store_true", help="collect and sort (golden tests)")
    sp.set_defaults(fn=_cmd_enumerate)

    sp = sub.add_parser("extremal", help="stream minimal/maximal elements")
    sp.add_argument("--clone", required=True)
    sp.add_argument("--side", required=True, choices=["max", "min"])
    common(sp, ud=False)
    sp.add_argument("--limit", type=int)
    sp.add_argument("--stats", action="store_true")
    sp.set_defaults(fn=_cmd_extremal)

    sp = sub.add_parser("classify", help="name the clone generated by tables")
    sp.add_argument("--ops", nargs="+", required=True)
    sp.set_defaults(fn=_cmd_classify)

    sp = sub.add_parser("oracle", help="saturation ground truth")
    sp.add_argument("--clone")
    sp.add_argument("--ops", nargs="*")
    common(sp)
    sp.add_argument("--limit", type=int)
    sp.add_argument("--stats", action="store_true")
    sp.set_defaults(fn=_cmd_oracle)

    sp = sub.add_parser("gen", help="instance generators")
    gsub = sp.add_subparsers(dest="generator", required=True)

    g = gsub.add_parser("mondnf", help="random monotone DNF or its relation")
    g.add_argument("--vars", type=int, default=6)
    g.add_argument("--terms", type=int, default=4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-width", type=int, default=3)
    g.add_argument("--input", help="existing DNF file: emit the union-side relation")
    g.set_defaults(fn=_cmd_gen)

    g = gsub.add_parser("2cnf", help="pairwise obstruction formula of a relation")
    g.add_argument("--input", required=True)
    g.set_defaults(fn=_cmd_gen)

    g = gsub.add_parser("hypergraph", help="never-covered windows of a relation")
    g.add_argument("--input", required=True)
    g.add_argument("-k", type=int, required=True)
    g.set_defaults(fn=_cmd_gen)

    g = gsub.add_parser("x3c", help="exact-cover membership instance")
    g.add_argument("--universe", type=int, required=True)
    g.add_argument("--triples", required=True, help="'1,2,3;4,5,6' (1-based)")
    g.set_defaults(fn=_cmd_gen)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.fn(args)
    except BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr, flush=True)
        return 3
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr, flush=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
