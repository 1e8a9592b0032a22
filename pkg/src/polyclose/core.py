"""Bit-packed boolean vectors, relations, and column analysis.

Vectors of width n are stored as Python ints: coordinate i (0-based) lives at
bit i, so whole-vector operations are single int operations.  Coordinate 0 is
the leftmost character of the text form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence


class WidthMismatch(ValueError):
    """Operands do not share a common width."""


class FormatError(ValueError):
    """A text input violates the relation/table format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def mask_of(width: int) -> int:
    return (1 << width) - 1


def lex_key(bits: int, width: int) -> int:
    """Order key matching lexicographic order of the digit string.

    Coordinate 0 is most significant, so ascending keys == ascending strings.
    """
    key = 0
    for i in range(width):
        key = (key << 1) | ((bits >> i) & 1)
    return key


def bits_to_string(bits: int, width: int) -> str:
    return "".join("1" if (bits >> i) & 1 else "0" for i in range(width))


def string_to_bits(text: str) -> int:
    bits = 0
    for i, ch in enumerate(text):
        if ch == "1":
            bits |= 1 << i
        elif ch != "0":
            raise ValueError(f"invalid digit {ch!r} in vector {text!r}")
    return bits


@dataclass(frozen=True, order=True)
class BitVector:
    """Fixed-width boolean vector; equality and hashing are coordinatewise.

    Width 0 is allowed so prefix extension tests are total at length 0.
    """

    width: int
    bits: int

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("width must be non-negative")
        if not 0 <= self.bits <= mask_of(self.width):
            raise ValueError(f"bits 0x{self.bits:x} out of range for width {self.width}")

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        return cls(len(text), string_to_bits(text))

    @classmethod
    def zeros(cls, width: int) -> "BitVector":
        return cls(width, 0)

    @classmethod
    def ones(cls, width: int) -> "BitVector":
        return cls(width, mask_of(width))

    def get(self, i: int) -> int:
        return (self.bits >> i) & 1

    def support(self) -> tuple[int, ...]:
        """Indices of the 1 coordinates."""
        return tuple(i for i in range(self.width) if (self.bits >> i) & 1)

    def count(self) -> int:
        return self.bits.bit_count()

    def complement(self) -> "BitVector":
        return BitVector(self.width, self.bits ^ mask_of(self.width))

    def __and__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self.width, self.bits & other.bits)

    def __or__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self.width, self.bits | other.bits)

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self.width, self.bits ^ other.bits)

    def is_subset_of(self, other: "BitVector") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def lex_key(self) -> int:
        return lex_key(self.bits, self.width)

    def _check(self, other: "BitVector"):
        if self.width != other.width:
            raise WidthMismatch(f"widths differ: {self.width} vs {other.width}")

    def __str__(self) -> str:
        return bits_to_string(self.bits, self.width)


@dataclass(frozen=True)
class IndexSet:
    """Strictly increasing subset of coordinates 0..width-1."""

    width: int
    members: tuple[int, ...]

    def __post_init__(self):
        last = -1
        for i in self.members:
            if i <= last:
                raise ValueError("members must be strictly increasing")
            last = i
        if self.members and not 0 <= self.members[0] <= self.members[-1] < self.width:
            raise ValueError("members out of range")

    @classmethod
    def of(cls, width: int, members: Iterable[int]) -> "IndexSet":
        return cls(width, tuple(sorted(set(members))))

    @classmethod
    def full(cls, width: int) -> "IndexSet":
        return cls(width, tuple(range(width)))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def mask(self) -> int:
        m = 0
        for i in self.members:
            m |= 1 << i
        return m


def project_bits(bits: int, members: Sequence[int]) -> int:
    out = 0
    for pos, i in enumerate(members):
        if (bits >> i) & 1:
            out |= 1 << pos
    return out


def embed_bits(bits: int, members: Sequence[int]) -> int:
    """Inverse of project_bits: place digit `pos` at coordinate members[pos]."""
    out = 0
    for pos, i in enumerate(members):
        if (bits >> pos) & 1:
            out |= 1 << i
    return out


class Relation:
    """Ordered, duplicate-free set of equal-width vectors.

    Rows are kept in first-occurrence order; a frozenset of the packed rows
    gives O(1) membership.  Column masks (bit j set iff row j has a 1 in that
    column) are materialized lazily for column-heavy algorithms.
    """

    __slots__ = ("width", "rows", "_row_set", "__dict__")

    def __init__(self, width: int, rows: Iterable[int]):
        if width < 0:
            raise ValueError("width must be non-negative")
        self.width = width
        seen = set()
        ordered = []
        limit = mask_of(width)
        for r in rows:
            if not 0 <= r <= limit:
                raise ValueError(f"row 0x{r:x} out of range for width {width}")
            if r not in seen:
                seen.add(r)
                ordered.append(r)
        self.rows: tuple[int, ...] = tuple(ordered)
        self._row_set = frozenset(ordered)

    @classmethod
    def from_vectors(cls, vectors: Iterable[BitVector]) -> "Relation":
        vs = list(vectors)
        if not vs:
            raise ValueError("cannot infer width from an empty vector list")
        width = vs[0].width
        for v in vs:
            if v.width != width:
                raise WidthMismatch("rows of differing widths")
        return cls(width, (v.bits for v in vs))

    @classmethod
    def from_strings(cls, rows: Iterable[str]) -> "Relation":
        return cls.from_vectors(BitVector.from_string(r) for r in rows)

    @property
    def m(self) -> int:
        return len(self.rows)

    def vectors(self) -> tuple[BitVector, ...]:
        return tuple(BitVector(self.width, r) for r in self.rows)

    def __contains__(self, item) -> bool:
        bits = item.bits if isinstance(item, BitVector) else item
        return bits in self._row_set

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Relation)
            and self.width == other.width
            and self._row_set == other._row_set
        )

    def __hash__(self) -> int:
        return hash((self.width, self._row_set))

    def __repr__(self) -> str:
        shown = ",".join(bits_to_string(r, self.width) for r in self.rows[:6])
        if self.m > 6:
            shown += ",..."
        return f"Relation(n={self.width}, m={self.m}, [{shown}])"

    @cached_property
    def columns(self) -> tuple[int, ...]:
        """Transposed storage: columns[i] has bit j set iff rows[j] has bit i."""
        cols = [0] * self.width
        for j, r in enumerate(self.rows):
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= 1 << j
                r ^= low
        return tuple(cols)

    def and_of_rows(self) -> int:
        acc = mask_of(self.width)
        for r in self.rows:
            acc &= r
        return acc

    def or_of_rows(self) -> int:
        acc = 0
        for r in self.rows:
            acc |= r
        return acc


def project(r: Relation, index_set: IndexSet) -> Relation:
    """Restrict every row to the given coordinates, dropping duplicates."""
    if index_set.width != r.width:
        raise WidthMismatch(
            f"index set is over width {index_set.width}, relation has width {r.width}"
        )
    members = index_set.members
    return Relation(len(members), (project_bits(row, members) for row in r.rows))


def complement_rows(r: Relation) -> Relation:
    m = mask_of(r.width)
    return Relation(r.width, (row ^ m for row in r.rows))


def union_rows(a: Relation, b: Relation) -> Relation:
    if a.width != b.width:
        raise WidthMismatch("relations of differing widths")
    return Relation(a.width, list(a.rows) + list(b.rows))


def equal_column_classes(r: Relation) -> list[tuple[int, ...]]:
    """Partition of the coordinates by exact column equality across all rows.

    Classes are ordered by smallest member; coordinatewise operations preserve
    column equality, so merged classes stay merged in any closure.
    """
    if r.m == 0:
        raise ValueError("column classes of an empty relation are undefined")
    groups: dict[int, list[int]] = {}
    for i, col in enumerate(r.columns):
        groups.setdefault(col, []).append(i)
    classes = sorted((tuple(g) for g in groups.values()), key=lambda c: c[0])
    return classes


# --- shared text format ----------------------------------------------------
#
# First non-comment line: "n m d"; then m lines of n digit characters.
# Lines starting with '#' are ignored.  d == 2 yields a boolean Relation;
# callers wanting larger domains use parse_domain_rows.


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_domain_rows(text: str) -> tuple[int, int, list[tuple[int, ...]]]:
    """Parse the "n m d" relation format; returns (width, domain size, rows)."""
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise FormatError("empty relation file") from None
    parts = header.split()
    if len(parts) != 3:
        raise FormatError("header must be 'n m d'", lineno)
    try:
        n, m, d = (int(p) for p in parts)
    except ValueError:
        raise FormatError("header fields must be integers", lineno) from None
    if n < 1 or m < 0 or d < 2:
        raise FormatError("header requires n >= 1, m >= 0, d >= 2", lineno)
    rows: list[tuple[int, ...]] = []
    for _ in range(m):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise FormatError(f"expected {m} rows, found {len(rows)}") from None
        if len(line) != n:
            raise FormatError(f"row has {len(line)} digits, expected {n}", lineno)
        try:
            digits = tuple(int(ch) for ch in line)
        except ValueError:
            raise FormatError("rows must be digit strings", lineno) from None
        if any(x >= d for x in digits):
            raise FormatError(f"digit out of domain [0,{d})", lineno)
        rows.append(digits)
    for lineno, _ in lines:
        raise FormatError("trailing content after last row", lineno)
    return n, d, rows


def parse_relation(text: str) -> Relation:
    n, d, rows = parse_domain_rows(text)
    if d != 2:
        raise FormatError(f"boolean relation expected, got domain size {d}")
    packed = []
    for digits in rows:
        bits = 0
        for i, x in enumerate(digits):
            if x:
                bits |= 1 << i
        packed.append(bits)
    return Relation(n, packed)


def format_relation(r: Relation, domain_size: int = 2) -> str:
    lines = [f"{r.width} {r.m} {domain_size}"]
    lines.extend(bits_to_string(row, r.width) for row in r.rows)
    return "\n".join(lines) + "\n"
