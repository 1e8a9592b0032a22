"""Solution streams with inter-yield operation counters.

Enumerators tick an OpCounter once per elementary step (a word-sized vector
operation, a row visit, a window lookup).  The stream records the largest
tick count between two consecutive yields, which is what the delay-bound
tests assert against.
"""

from __future__ import annotations

from typing import Iterator

from .core import BitVector


class OpCounter:
    __slots__ = ("ops",)

    def __init__(self):
        self.ops = 0

    def tick(self, k: int = 1):
        self.ops += k


class SolutionStream:
    """Single-consumer iterator over BitVectors with delay instrumentation.

    max_delay_ops is the maximum number of counter ticks between consecutive
    yields (including before the first yield and after the last); setup work
    done before the generator starts counts as precomputation and is excluded.
    """

    def __init__(
        self,
        gen: Iterator[BitVector],
        counter: OpCounter | None = None,
        algorithm: str = "",
        polynomial_delay: bool = True,
        notes: tuple[str, ...] = (),
    ):
        self._gen = gen
        self.counter = counter or OpCounter()
        self.algorithm = algorithm
        self.polynomial_delay = polynomial_delay
        self.notes = notes
        self.solutions = 0
        self.max_delay_ops = 0
        self._mark = self.counter.ops
        self._exhausted = False

    def __iter__(self):
        return self

    def __next__(self) -> BitVector:
        try:
            value = next(self._gen)
        except StopIteration:
            if not self._exhausted:
                self._exhausted = True
                self._note_gap()
            raise
        self._note_gap()
        self.solutions += 1
        return value

    def _note_gap(self):
        gap = self.counter.ops - self._mark
        if gap > self.max_delay_ops:
            self.max_delay_ops = gap
        self._mark = self.counter.ops

    def collect_set(self, limit: int | None = None) -> set[BitVector]:
        out = set()
        for v in self:
            out.add(v)
            if limit is not None and len(out) >= limit:
                break
        return out

    def collect(self, limit: int | None = None) -> list[BitVector]:
        out = []
        for v in self:
            out.append(v)
            if limit is not None and len(out) >= limit:
                break
        return out
