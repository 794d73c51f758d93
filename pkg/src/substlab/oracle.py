"""Brute-force oracles over both sides of a substitution system.

Interpretation tables, bijection cross-checks, L1 tightening and the
inf/step accounting all live here.
"""
from __future__ import annotations

import itertools
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

import numpy as np

from .errors import AccountingViolation, BudgetExceeded, DuplicateY1, EmptyDomain, NoSteps, ShapeMismatch
from .exact import integer_inverse
from .subst import SubstInstance, SubstSystem, instance_for

DEFAULT_BUDGET = 10**7
LEX = "lex"
DESC = "desc"


def default_budget() -> int:
    return int(os.environ.get("SUBSTLAB_BUDGET", DEFAULT_BUDGET))


@dataclass
class StepCounter:
    """Running inf (I) and step (N) counts.

    One step per elementary integer operation; one inf per interpretation
    examined. Every inf is charged at least one step.
    """

    infs: int = 0
    steps: int = 0

    def charge(self, steps: int, infs: int = 0):
        self.steps += max(steps, infs)
        self.infs += infs

    def merge(self, other: "StepCounter"):
        self.infs += other.infs
        self.steps += other.steps


def enum_x(n: int, c: int) -> list[tuple[int, ...]]:
    """All 0/1 vectors of length n with exactly c ones, ascending lexicographic."""
    if c < 0 or c > n:
        warnings.warn(EmptyDomain(f"no 0/1 vector of length {n} has {c} ones"), stacklevel=2)
        return []
    out = []
    # zeros placed at the earliest positions first gives ascending order
    for zeros in itertools.combinations(range(n), n - c):
        v = [1] * n
        for z in zeros:
            v[z] = 0
        out.append(tuple(v))
    return out


@dataclass(frozen=True)
class InterpretationRow:
    x: tuple[int, ...]
    y: tuple[int, ...]


@dataclass(frozen=True)
class InterpretationTable:
    rows: tuple[InterpretationRow, ...]
    order: str

    def __len__(self):
        return len(self.rows)

    def y1(self) -> list[int]:
        return [r.y[0] for r in self.rows]


def build_table(s: SubstSystem, order: str = LEX, counter: StepCounter | None = None) -> InterpretationTable:
    if order not in (LEX, DESC):
        raise ValueError(f"unknown order {order!r}")
    n = s.n
    rows = []
    for x in enum_x(n, s.c):
        rows.append(InterpretationRow(x, s.image(x)))
        if counter is not None:
            counter.charge(n * n + n, infs=1)
    if order == DESC:
        y1 = [r.y[0] for r in rows]
        if len(set(y1)) != len(y1):
            raise DuplicateY1("y1 values collide; a strict descending order does not exist")
        rows.sort(key=lambda r: r.y[0], reverse=True)
    return InterpretationTable(tuple(rows), order)


def box_points(inst: SubstInstance) -> int:
    return prod(hi - lo + 1 for lo, hi in inst.boxes)


def enum_y_bruteforce(inst: SubstInstance, budget: int | None = None,
                      counter: StepCounter | None = None) -> list[tuple[int, ...]]:
    """Every integer y in the box product with a.y = c, by scanning all points."""
    budget = default_budget() if budget is None else budget
    total = box_points(inst)
    if total > budget:
        raise BudgetExceeded(total, budget)
    a, c, n = inst.a, inst.c, inst.n
    reach = sum(abs(ai) * max(abs(lo), abs(hi)) for ai, (lo, hi) in zip(a, inst.boxes))
    if abs(c) > reach:
        hits = []
    elif reach < 2**62:
        # partial sums over the whole grid in C order, i.e. lexicographic in y
        acc = np.zeros(1, dtype=np.int64)
        for ai, (lo, hi) in zip(a, inst.boxes):
            acc = np.add.outer(acc, ai * np.arange(lo, hi + 1, dtype=np.int64)).ravel()
        idx = np.flatnonzero(acc == c)
        shape = [hi - lo + 1 for lo, hi in inst.boxes]
        coords = np.unravel_index(idx, shape)
        lows = [lo for lo, _ in inst.boxes]
        hits = [tuple(int(coords[i][t]) + lows[i] for i in range(n)) for t in range(len(idx))]
    else:
        ranges = [range(lo, hi + 1) for lo, hi in inst.boxes]
        hits = [y for y in itertools.product(*ranges) if sum(ai * yi for ai, yi in zip(a, y)) == c]
    if counter is not None:
        counter.charge(total * n, infs=total)
    return hits


@dataclass
class BijectionReport:
    x_count: int
    y_count: int
    matched: int
    extra_y: list[tuple[int, ...]] = field(default_factory=list)
    out_of_box_x: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.extra_y and not self.out_of_box_x and self.x_count == self.y_count


def verify_bijection(inst: SubstInstance, s: SubstSystem, budget: int | None = None,
                     counter: StepCounter | None = None) -> BijectionReport:
    """Cross-check the image of the 0/1 side against a brute-force y scan."""
    if inst.n != s.n:
        raise ShapeMismatch(f"instance has n = {inst.n}, system has n = {s.n}")
    ys = enum_y_bruteforce(inst, budget, counter)
    table = build_table(s, LEX, counter)
    inv = integer_inverse(s.B)
    image = {}
    out_of_box = []
    for row in table.rows:
        # B invertible: distinct x must give distinct y
        assert row.y not in image
        back = inv.apply([v - o for v, o in zip(row.y, s.offset)])
        assert back == row.x
        image[row.y] = row.x
        if not inst.in_boxes(row.y):
            out_of_box.append(row.x)
    found = set(ys)
    matched = sum(1 for y in image if y in found)
    extra = [y for y in ys if y not in image]
    return BijectionReport(len(table), len(ys), matched, extra, out_of_box)


def _row_feasible(inst: SubstInstance, y) -> bool:
    return inst.satisfied_by(y)


def tighten_L1(inst: SubstInstance, table: InterpretationTable, k: int) -> SubstInstance:
    """Raise L1 just above row k's y1 so rows 1..k-1 stay feasible and row k does not."""
    if table.order != DESC:
        raise ValueError("tightening needs a table in descending-y1 order")
    y1 = table.y1()
    if len(set(y1)) != len(y1):
        raise DuplicateY1("cannot separate rows with equal y1")
    if not 1 <= k <= len(table):
        raise IndexError(f"k = {k} outside 1..{len(table)}")
    _, hi = inst.boxes[0]
    lo = y1[k - 1] + 1
    # keep the box nonempty; every row sits below lo regardless
    return inst.with_box(0, (lo, max(hi, lo)))


@dataclass(frozen=True)
class IndependenceWitness:
    instance: SubstInstance
    satisfied_rows: tuple[int, ...]
    violated_row: int
    table: InterpretationTable = field(repr=False)


def independence_witness(s: SubstSystem, k: int) -> IndependenceWitness:
    """Instance on which rows 1..k-1 of the descending table hold and row k fails."""
    table = build_table(s, DESC)
    tightened = tighten_L1(instance_for(s), table, k)
    sat = tuple(i + 1 for i, r in enumerate(table.rows[: k - 1]) if _row_feasible(tightened, r.y))
    assert sat == tuple(range(1, k)), "prefix rows must stay feasible"
    assert not _row_feasible(tightened, table.rows[k - 1].y)
    return IndependenceWitness(tightened, sat, k, table)


@dataclass(frozen=True)
class ThroughputReport:
    infs: int
    steps: int
    throughput: Fraction


def throughput_report(infs: int, steps: int) -> ThroughputReport:
    if steps == 0:
        raise NoSteps("no steps recorded")
    if infs > steps:
        raise AccountingViolation(f"{infs} infs considered in only {steps} steps")
    return ThroughputReport(infs, steps, Fraction(infs, steps))
