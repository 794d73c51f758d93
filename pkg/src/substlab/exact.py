"""Exact integer matrices, bit-size metrics and coefficient bounds.

Every scalar is a plain Python ``int``; nothing here ever touches floats.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, gcd
from typing import Iterable, Sequence

from .errors import CoprimalityViolation, NotUnimodular, ShapeMismatch, Singular


def size_scalar(p: int, q: int = 1) -> int:
    """Bit size of the rational p/q: 1 + ceil(log2(|p|+1)) + ceil(log2(q+1))."""
    if q <= 0:
        raise ValueError(f"denominator must be positive, got {q}")
    if gcd(abs(p), q) != 1:
        raise CoprimalityViolation(f"gcd({p}, {q}) != 1")
    # ceil(log2(m + 1)) == m.bit_length() for every m >= 0
    return 1 + abs(p).bit_length() + q.bit_length()


def size_vector(v: Iterable[int]) -> int:
    v = list(v)
    return len(v) + sum(size_scalar(x) for x in v)


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows or not rows[0]:
            raise ShapeMismatch("matrix needs at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeMismatch("ragged rows")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(tuple((0,) * n for _ in range(m)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def is_square(self) -> bool:
        m, n = self.shape
        return m == n

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape[1] != other.shape[0]:
            raise ShapeMismatch(f"{self.shape} @ {other.shape}")
        cols = other.transpose().rows
        return IntMatrix(tuple(
            tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows
        ))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product."""
        if len(v) != self.shape[1]:
            raise ShapeMismatch(f"{self.shape} applied to vector of length {len(v)}")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def max_abs(self) -> int:
        return max(abs(x) for r in self.rows for x in r)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __str__(self):
        return "\n".join(" ".join(f"{x:>4}" for x in r) for r in self.rows)


def vec_mat(v: Sequence[int], B: IntMatrix) -> tuple[int, ...]:
    """Row vector times matrix, v^T B."""
    if len(v) != B.shape[0]:
        raise ShapeMismatch(f"vector of length {len(v)} times {B.shape}")
    return tuple(sum(a * b for a, b in zip(v, col)) for col in B.transpose().rows)


def size_matrix(B: IntMatrix) -> int:
    m, n = B.shape
    return m * n + sum(size_scalar(x) for r in B.rows for x in r)


@dataclass(frozen=True)
class DetResult:
    """Determinant plus the magnitudes Bareiss elimination passed through.

    Each entry of ``minors`` is the absolute value of a k x k minor of the
    (row-permuted) input; ``leading`` holds the successive pivots.
    """

    value: int
    leading: tuple[int, ...] = ()
    minors: tuple[int, ...] = field(default=(), repr=False)

    def __int__(self):
        return self.value


def bareiss(B: IntMatrix) -> DetResult:
    if not B.is_square:
        raise ShapeMismatch(f"determinant of non-square {B.shape} matrix")
    n = B.shape[0]
    a = [list(r) for r in B.rows]
    minors = [abs(x) for r in a for x in r]
    leading = []
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return DetResult(0, tuple(leading), tuple(minors))
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        piv = a[k][k]
        leading.append(piv)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * piv - a[i][k] * a[k][j]
                q, r = divmod(num, prev)
                assert r == 0, "Bareiss division must be exact"
                a[i][j] = q
                minors.append(abs(q))
            a[i][k] = 0
        prev = piv
    leading.append(a[n - 1][n - 1])
    return DetResult(sign * a[n - 1][n - 1], tuple(leading), tuple(minors))


def det(B: IntMatrix) -> int:
    return bareiss(B).value


def _drop(B: IntMatrix, i: int, j: int) -> IntMatrix:
    return IntMatrix(tuple(
        tuple(x for c, x in enumerate(r) if c != j) for k, r in enumerate(B.rows) if k != i
    ))


def adjugate(B: IntMatrix) -> IntMatrix:
    if not B.is_square:
        raise ShapeMismatch(f"adjugate of non-square {B.shape} matrix")
    n = B.shape[0]
    if n == 1:
        return IntMatrix(((1,),))
    # adj[i][j] = (-1)^(i+j) * M_ji
    return IntMatrix(tuple(
        tuple((-1) ** (i + j) * det(_drop(B, j, i)) for j in range(n)) for i in range(n)
    ))


def integer_inverse(B: IntMatrix) -> IntMatrix:
    d = det(B)
    if d == 0:
        raise Singular("matrix is singular")
    if abs(d) != 1:
        raise NotUnimodular(f"det = {d}; no integer inverse exists")
    adj = adjugate(B)
    out = []
    for r in adj.rows:
        row = []
        for x in r:
            q, rem = divmod(x, d)
            assert rem == 0
            row.append(q)
        out.append(tuple(row))
    return IntMatrix(tuple(out))


@dataclass(frozen=True)
class MinorBoundReport:
    max_minor: int
    bound: int
    holds: bool


def minor_bound_check(B: IntMatrix) -> MinorBoundReport:
    """Compare every minor met during elimination against n! * M^n."""
    res = bareiss(B)
    n = B.shape[0]
    bound = factorial(n) * B.max_abs() ** n
    mx = max(res.minors)
    return MinorBoundReport(mx, bound, mx <= bound)
