import random
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from substlab.errors import CoprimalityViolation, NotUnimodular, ShapeMismatch, Singular
from substlab.exact import (
    IntMatrix,
    bareiss,
    det,
    integer_inverse,
    minor_bound_check,
    size_matrix,
    size_scalar,
    size_vector,
)

from oracles import cofactor_det, identity, matmul, size_by_logs

WORKED_B = IntMatrix.of([[1, 1, -2], [3, 4, -3], [2, -3, -20]])


@pytest.mark.parametrize("p,q,expected", [(0, 1, 2), (1, 1, 3), (52, 1, 8), (-15, 1, 6), (3, 4, 6)])
def test_size_scalar(p, q, expected):
    assert size_scalar(p, q) == expected


def test_size_scalar_rejects_non_coprime():
    with pytest.raises(CoprimalityViolation):
        size_scalar(4, 6)


@given(st.integers(-10**40, 10**40), st.integers(1, 10**6))
def test_size_scalar_matches_log_formula(p, q):
    from math import gcd
    if gcd(abs(p), q) != 1:
        return
    if abs(p) < 2**50:
        assert size_scalar(p, q) == size_by_logs(p, q)
    else:
        # floats lose the ceiling at this magnitude; bit_length is exact
        assert size_scalar(p, q) == 1 + abs(p).bit_length() + q.bit_length()


def test_size_vector():
    assert size_vector([0]) == 3
    assert size_vector([1, 1, 1]) == 12
    assert size_vector([52, -15, -3]) == 21


def test_size_matrix():
    assert size_matrix(IntMatrix.of([[0]])) == 3
    assert size_matrix(IntMatrix.identity(2)) == 14
    assert size_matrix(WORKED_B) == 47


@given(st.lists(st.lists(st.integers(-50, 50), min_size=3, max_size=3), min_size=2, max_size=4))
def test_size_matrix_lower_bound(rows):
    B = IntMatrix.of(rows)
    m, n = B.shape
    assert size_matrix(B) >= 3 * m * n


def test_det_examples():
    assert det(IntMatrix.identity(3)) == 1
    assert det(IntMatrix.of([[1, 2], [2, 4]])) == 0
    assert det(WORKED_B) == -1


def test_det_needs_square():
    with pytest.raises(ShapeMismatch):
        det(IntMatrix.of([[1, 2, 3], [4, 5, 6]]))


square = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)
)


@given(square)
def test_det_matches_cofactor_expansion(rows):
    assert det(IntMatrix.of(rows)) == cofactor_det(rows)


@given(square.flatmap(lambda a: st.tuples(st.just(a), st.lists(
    st.lists(st.integers(-9, 9), min_size=len(a), max_size=len(a)), min_size=len(a), max_size=len(a)))))
def test_det_is_multiplicative(pair):
    a, b = pair
    A, B = IntMatrix.of(a), IntMatrix.of(b)
    assert det(A @ B) == det(A) * det(B)


def test_det_big_entries():
    big = 10**30
    B = IntMatrix.of([[big, 1], [1, big]])
    assert det(B) == big * big - 1


def test_bareiss_reports_leading_pivots():
    res = bareiss(WORKED_B)
    assert res.value == -1
    # leading principal minors of WORKED_B: 1, 1, -1
    assert res.leading == (1, 1, -1)


def test_integer_inverse_examples():
    assert integer_inverse(IntMatrix.identity(4)) == IntMatrix.identity(4)
    assert integer_inverse(WORKED_B).rows == ((89, -26, -5), (-54, 16, 3), (17, -5, -1))
    with pytest.raises(NotUnimodular):
        integer_inverse(IntMatrix.of([[2, 0], [0, 1]]))
    with pytest.raises(Singular):
        integer_inverse(IntMatrix.of([[1, 2], [2, 4]]))


def random_unimodular(rng, n, ops=12, k=4):
    M = identity(n)
    for _ in range(ops):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            M = [[-v for v in r] for r in M]
            continue
        f = rng.randint(-k, k)
        M[i] = [a + f * b for a, b in zip(M[i], M[j])]
        if rng.random() < 0.3:
            M[i], M[j] = M[j], M[i]
    return M


@pytest.mark.parametrize("seed", range(40))
def test_inverse_of_random_unimodular(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    rows = random_unimodular(rng, n)
    B = IntMatrix.of(rows)
    inv = integer_inverse(B)
    assert matmul(rows, inv.tolist()) == identity(n)
    assert integer_inverse(inv) == B


def test_minor_bound_examples():
    r = minor_bound_check(IntMatrix.identity(3))
    assert (r.max_minor, r.bound, r.holds) == (1, 6, True)
    r = minor_bound_check(WORKED_B)
    assert r.bound == factorial(3) * 20**3 == 48000
    assert r.holds


@pytest.mark.parametrize("seed", range(100))
def test_minor_bound_random_5x5(seed):
    rng = random.Random(seed)
    B = IntMatrix.of([[rng.randint(-9, 9) for _ in range(5)] for _ in range(5)])
    if B.max_abs() == 0:
        return
    assert minor_bound_check(B).holds


@settings(max_examples=50)
@given(square)
def test_every_bareiss_entry_is_bounded(rows):
    B = IntMatrix.of(rows)
    if B.max_abs() == 0:
        return
    n = len(rows)
    assert max(bareiss(B).minors) <= factorial(n) * B.max_abs() ** n


def test_intmatrix_validation():
    with pytest.raises(ShapeMismatch):
        IntMatrix.of([[1, 2], [3]])
    with pytest.raises(ShapeMismatch):
        IntMatrix.of([])
