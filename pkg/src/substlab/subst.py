"""Substitution systems between a bounded linear Diophantine equation and a
0/1 cardinality constraint.

The Diophantine side is ``a . y = c`` with ``L_i <= y_i <= R_i``; the
substitution side is ``y = B x + offset`` with ``x`` in {0,1}^n and
``sum(x) = c``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    DegeneratePivot,
    IncompleteTrace,
    NonUnitPivot,
    NotUnimodularEquivalent,
    ShapeMismatch,
    Singular,
)
from .exact import IntMatrix, det, integer_inverse, size_matrix, size_scalar, size_vector, vec_mat

Box = tuple[int, int]


@dataclass(frozen=True)
class SubstInstance:
    a: tuple[int, ...]
    c: int
    boxes: tuple[Box, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        boxes = tuple((int(lo), int(hi)) for lo, hi in self.boxes)
        if not a:
            raise ShapeMismatch("instance needs at least one variable")
        if len(a) != len(boxes):
            raise ShapeMismatch(f"{len(a)} coefficients but {len(boxes)} boxes")
        for i, (lo, hi) in enumerate(boxes):
            if lo > hi:
                raise ValueError(f"box {i + 1} is empty: [{lo}, {hi}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", int(self.c))
        object.__setattr__(self, "boxes", boxes)

    @property
    def n(self) -> int:
        return len(self.a)

    def lg3(self) -> int:
        """Encoding length: sizes of a, c and every box endpoint."""
        return (size_vector(self.a) + size_scalar(self.c)
                + sum(size_scalar(lo) + size_scalar(hi) for lo, hi in self.boxes))

    def in_boxes(self, y: Sequence[int]) -> bool:
        return all(lo <= v <= hi for v, (lo, hi) in zip(y, self.boxes))

    def satisfied_by(self, y: Sequence[int]) -> bool:
        return self.in_boxes(y) and sum(ai * yi for ai, yi in zip(self.a, y)) == self.c

    def with_box(self, i: int, box: Box) -> "SubstInstance":
        boxes = list(self.boxes)
        boxes[i] = box
        return SubstInstance(self.a, self.c, tuple(boxes))


@dataclass(frozen=True)
class SubstSystem:
    B: IntMatrix
    c: int
    offset: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.B.is_square:
            raise ShapeMismatch(f"substitution matrix must be square, got {self.B.shape}")
        n = self.B.shape[0]
        offset = tuple(int(x) for x in self.offset) or (0,) * n
        if len(offset) != n:
            raise ShapeMismatch(f"offset of length {len(offset)} for n = {n}")
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "c", int(self.c))

    @property
    def n(self) -> int:
        return self.B.shape[0]

    def image(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(v + o for v, o in zip(self.B.apply(x), self.offset))

    def preimage(self, y: Sequence[int]) -> tuple[int, ...]:
        return integer_inverse(self.B).apply([v - o for v, o in zip(y, self.offset)])

    def is_unimodular(self) -> bool:
        return abs(det(self.B)) == 1


@dataclass(frozen=True)
class PolyBound:
    """Polynomial with nonnegative integer coefficients, lowest degree first."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        cs = tuple(int(x) for x in self.coefficients)
        if not cs:
            raise ValueError("PolyBound needs at least one coefficient")
        if any(x < 0 for x in cs):
            raise ValueError("PolyBound coefficients must be nonnegative")
        object.__setattr__(self, "coefficients", cs)

    def __call__(self, x: int) -> int:
        acc = 0
        for k in reversed(self.coefficients):
            acc = acc * x + k
        return acc


# -- forward / backward elimination -----------------------------------------

@dataclass(frozen=True)
class ElimStep:
    """x_i = sum_j y_coeffs[j] * y_j + sum_k x_coeffs[k] * x_k.

    Only y_1..y_i and x_{i+1}..x_n may carry nonzero coefficients.
    """

    index: int  # 0-based
    y_coeffs: tuple[int, ...]
    x_coeffs: tuple[int, ...]

    def render(self) -> str:
        terms = [(v, f"y{j + 1}") for j, v in enumerate(self.y_coeffs)]
        terms += [(v, f"x{k + 1}") for k, v in enumerate(self.x_coeffs)]
        return f"x{self.index + 1} = {render_linear(terms)}"


def render_linear(terms) -> str:
    out = []
    for coef, name in terms:
        if coef == 0:
            continue
        mag = "" if abs(coef) == 1 else str(abs(coef))
        if not out:
            out.append(("-" if coef < 0 else "") + mag + name)
        else:
            out.append(("- " if coef < 0 else "+ ") + mag + name)
    return " ".join(out) if out else "0"


@dataclass(frozen=True)
class EliminationTrace:
    n: int
    steps: tuple[ElimStep, ...]
    pivots: tuple[int, ...]
    # each row y_i = ... rewritten over y_1..y_{i-1}, x_i..x_n before solving
    reduced_rows: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = field(default=(), repr=False)

    def coefficients(self):
        for st in self.steps:
            yield from st.y_coeffs
            yield from st.x_coeffs
        for ys, xs in self.reduced_rows:
            yield from ys
            yield from xs


def _reduce_row(row: Sequence[int], steps: Sequence[ElimStep], n: int):
    """Rewrite y_i = row . x by substituting earlier steps in order."""
    ys = [0] * n
    xs = list(row)
    for st in steps:
        k = xs[st.index]
        if k == 0:
            continue
        xs[st.index] = 0
        for j in range(n):
            ys[j] += k * st.y_coeffs[j]
            xs[j] += k * st.x_coeffs[j]
    return ys, xs


def _solve_step(i: int, ys, xs, n: int) -> ElimStep:
    # y_i = ys . y + p * x_i + rest  ->  x_i = p * (y_i - ys . y - rest), valid for p = +-1
    p = xs[i]
    yc = [-p * v for v in ys]
    yc[i] += p
    xc = [-p * v if k != i else 0 for k, v in enumerate(xs)]
    return ElimStep(i, tuple(yc), tuple(xc))


def forward_eliminate(s: SubstSystem | IntMatrix) -> EliminationTrace:
    """Express x_1, x_2, ... in turn from y_1, y_2, ... with unit pivots."""
    B = s.B if isinstance(s, SubstSystem) else s
    if not B.is_square:
        raise ShapeMismatch(f"elimination needs a square matrix, got {B.shape}")
    n = B.shape[0]
    steps, pivots, reduced = [], [], []
    for i in range(n):
        ys, xs = _reduce_row(B.rows[i], steps, n)
        p = xs[i]
        if p == 0:
            raise DegeneratePivot(i + 1, p)
        if abs(p) != 1:
            raise NonUnitPivot(i + 1, p)
        reduced.append((tuple(ys), tuple(xs)))
        steps.append(_solve_step(i, ys, xs, n))
        pivots.append(p)
    return EliminationTrace(n, tuple(steps), tuple(pivots), tuple(reduced))


def back_substitute(t: EliminationTrace) -> IntMatrix:
    """Resolve the trace into x = M y; M is the integer inverse of B."""
    n = t.n
    if len(t.steps) != n or [st.index for st in t.steps] != list(range(n)):
        raise IncompleteTrace(f"trace has {len(t.steps)} of {n} steps")
    pure: list[list[int] | None] = [None] * n
    for st in reversed(t.steps):
        row = list(st.y_coeffs)
        for k, coef in enumerate(st.x_coeffs):
            if coef:
                assert k > st.index and pure[k] is not None
                for j in range(n):
                    row[j] += coef * pure[k][j]
        pure[st.index] = row
    return IntMatrix(tuple(tuple(r) for r in pure))


# -- boxes, R1, link --------------------------------------------------------

def derive_boxes(s: SubstSystem) -> tuple[Box, ...]:
    return tuple(
        (o + sum(min(b, 0) for b in row), o + sum(max(b, 0) for b in row))
        for row, o in zip(s.B.rows, s.offset)
    )


@dataclass(frozen=True)
class R1Row:
    index: int
    instance_box: Box
    derived_box: Box
    passed: bool


@dataclass(frozen=True)
class R1Report:
    rows: tuple[R1Row, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[int]:
        return [r.index for r in self.rows if not r.passed]


def verify_r1(inst: SubstInstance, s: SubstSystem) -> R1Report:
    """Instance boxes must contain the image bounds of their substitutions."""
    if inst.n != s.n:
        raise ShapeMismatch(f"instance has n = {inst.n}, system has n = {s.n}")
    rows = []
    for i, (have, want) in enumerate(zip(inst.boxes, derive_boxes(s))):
        ok = have[0] <= want[0] and have[1] >= want[1]
        rows.append(R1Row(i + 1, have, want, ok))
    return R1Report(tuple(rows))


@dataclass(frozen=True)
class LinkReport:
    aB: tuple[int, ...]
    linked: bool


def verify_cardinality_link(inst: SubstInstance, s: SubstSystem) -> LinkReport:
    """a^T B must be all ones so that a.y = c  <=>  sum(x) = c under y = Bx + offset."""
    if inst.n != s.n:
        raise ShapeMismatch(f"instance has n = {inst.n}, system has n = {s.n}")
    aB = vec_mat(inst.a, s.B)
    shift = sum(ai * oi for ai, oi in zip(inst.a, s.offset))
    ok = all(v == 1 for v in aB) and inst.c == s.c + shift
    return LinkReport(aB, ok)


def instance_for(s: SubstSystem) -> SubstInstance:
    """The Diophantine instance a system solves: a = 1^T B^-1, tight R1 boxes."""
    inv = integer_inverse(s.B)
    a = vec_mat((1,) * s.n, inv)
    c = s.c + sum(ai * oi for ai, oi in zip(a, s.offset))
    return SubstInstance(a, c, derive_boxes(s))


# -- generators ---------------------------------------------------------------

def default_cardinality(n: int) -> int:
    return (n + 1) // 2


def _fill_rows(first_row: Sequence[int], n: int, rng: random.Random, bound: int) -> IntMatrix:
    rows = [list(first_row)]
    steps = [_solve_step(0, [0] * n, rows[0], n)]
    for i in range(1, n):
        row = [rng.randint(-bound, bound) for _ in range(n)]
        row[i] = 0
        _, xs = _reduce_row(row, steps, n)
        # the diagonal enters the reduced pivot unchanged, so shift it onto +-1
        row[i] = rng.choice((1, -1)) - xs[i]
        ys, xs = _reduce_row(row, steps, n)
        steps.append(_solve_step(i, ys, xs, n))
        rows.append(row)
    return IntMatrix.of(rows)


def generate_note1(n: int, seed: int, coeff_bound: int = 10, c: int | None = None) -> SubstSystem:
    """Random unimodular system that passes unit-pivot elimination by construction."""
    if n < 1 or coeff_bound < 1:
        raise ValueError("need n >= 1 and coeff_bound >= 1")
    rng = random.Random(seed)
    first = [1] + [rng.randint(-coeff_bound, coeff_bound) for _ in range(n - 1)]
    B = _fill_rows(first, n, rng, coeff_bound)
    return SubstSystem(B, default_cardinality(n) if c is None else c)


def generate_descending(n: int, seed: int, coeff_bound: int = 10, c: int | None = None) -> SubstSystem:
    """Like :func:`generate_note1` but the first row is 1, 2, 4, ..., 2^(n-1).

    Superincreasing coefficients give every 0/1 vector a distinct y_1.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    rng = random.Random(seed)
    B = _fill_rows([1 << j for j in range(n)], n, rng, coeff_bound)
    return SubstSystem(B, n // 2 if c is None else c)


def is_superincreasing(row: Sequence[int]) -> bool:
    total = 0
    for v in row:
        if v <= total:
            return False
        total += v
    return True


# -- R2 normalization -------------------------------------------------------

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def column_triangularize(B: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Unimodular U with B U lower triangular (row-by-row extended Euclid)."""
    n = B.shape[0]
    A = [list(r) for r in B.rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(M, i, j, p, q, r, s):
        # (col_i, col_j) <- (p col_i + q col_j, r col_i + s col_j), ps - qr = 1
        for row in M:
            u, v = row[i], row[j]
            row[i], row[j] = p * u + q * v, r * u + s * v

    for i in range(n):
        if all(A[i][j] == 0 for j in range(i, n)):
            raise Singular("matrix is singular")
        for j in range(i + 1, n):
            u, v = A[i][i], A[i][j]
            if v == 0:
                continue
            g, x, y = _xgcd(u, v)
            # [u v] [[x, -v/g], [y, u/g]] = [g 0], determinant 1
            colop(A, i, j, x, y, -v // g, u // g)
            colop(U, i, j, x, y, -v // g, u // g)
    return IntMatrix.of(A), IntMatrix.of(U)


def r2_normalize(B: IntMatrix, c: int | None = None) -> SubstSystem:
    """Unimodular column operations so unit-pivot elimination succeeds.

    Systems that already pass are returned unchanged.
    """
    if not B.is_square:
        raise ShapeMismatch(f"need a square matrix, got {B.shape}")
    d = det(B)
    if d == 0:
        raise Singular("matrix is singular")
    if abs(d) != 1:
        raise NotUnimodularEquivalent(f"|det| = {abs(d)}; unit pivots are impossible")
    n = B.shape[0]
    c = default_cardinality(n) if c is None else c
    try:
        forward_eliminate(B)
        return SubstSystem(B, c)
    except (NonUnitPivot, DegeneratePivot):
        pass
    L, _ = column_triangularize(B)
    return SubstSystem(L, c)


# -- size checks ------------------------------------------------------------

@dataclass(frozen=True)
class IntermediateSizeReport:
    max_size: int
    bound: int
    holds: bool


def intermediate_size_check(t: EliminationTrace, B: IntMatrix) -> IntermediateSizeReport:
    mx = max(size_scalar(v) for v in t.coefficients())
    bound = 4 * size_matrix(B)
    return IntermediateSizeReport(mx, bound, mx <= bound)


@dataclass(frozen=True)
class SizeBoundReport:
    size_B: int
    size_inverse: int
    omega: int
    holds: bool


def size_bound_check(s: SubstSystem, omega: PolyBound, lg3: int) -> SizeBoundReport:
    sb = size_matrix(s.B)
    si = size_matrix(integer_inverse(s.B))
    w = omega(lg3)
    return SizeBoundReport(sb, si, w, sb <= w and si <= w)
