import itertools
import random

import pytest
from hypothesis import given, strategies as st

from substlab.errors import DegeneratePivot, IncompleteTrace, NonUnitPivot, NotUnimodularEquivalent
from substlab.exact import IntMatrix, det, integer_inverse
from substlab.subst import (
    EliminationTrace,
    PolyBound,
    SubstInstance,
    SubstSystem,
    back_substitute,
    column_triangularize,
    derive_boxes,
    forward_eliminate,
    generate_descending,
    generate_note1,
    instance_for,
    intermediate_size_check,
    is_superincreasing,
    r2_normalize,
    size_bound_check,
    verify_cardinality_link,
    verify_r1,
)

from oracles import cofactor_det, identity, matmul

WORKED_B = IntMatrix.of([[1, 1, -2], [3, 4, -3], [2, -3, -20]])
WORKED_SYS = SubstSystem(WORKED_B, 2)
WORKED_INST = SubstInstance((52, -15, -3), 2, ((-2, 2), (-3, 7), (-23, 2)))


def test_forward_eliminate_worked():
    t = forward_eliminate(WORKED_SYS)
    assert [s.render() for s in t.steps] == [
        "x1 = y1 - x2 + 2x3",
        "x2 = -3y1 + y2 - 3x3",
        "x3 = 17y1 - 5y2 - y3",
    ]
    assert t.pivots == (1, 1, -1)


def test_forward_eliminate_identity():
    t = forward_eliminate(IntMatrix.identity(4))
    for i, s in enumerate(t.steps):
        assert s.y_coeffs == tuple(int(j == i) for j in range(4))
        assert not any(s.x_coeffs)


def test_forward_eliminate_errors():
    with pytest.raises(NonUnitPivot) as e:
        forward_eliminate(IntMatrix.of([[2, 0], [0, 1]]))
    assert e.value.step == 1
    with pytest.raises(DegeneratePivot) as e:
        forward_eliminate(IntMatrix.of([[1, 1], [1, 1]]))
    assert e.value.step == 2


def test_trace_shape_invariant():
    t = forward_eliminate(generate_note1(6, 3, 5))
    for s in t.steps:
        i = s.index
        assert not any(s.y_coeffs[i + 1:])
        assert not any(s.x_coeffs[: i + 1])


def test_back_substitute_worked():
    inv = back_substitute(forward_eliminate(WORKED_SYS))
    assert inv.rows == ((89, -26, -5), (-54, 16, 3), (17, -5, -1))


def test_back_substitute_identity_and_incomplete():
    assert back_substitute(forward_eliminate(IntMatrix.identity(3))) == IntMatrix.identity(3)
    t = forward_eliminate(WORKED_SYS)
    with pytest.raises(IncompleteTrace):
        back_substitute(EliminationTrace(3, t.steps[:2], t.pivots[:2]))


@pytest.mark.parametrize("seed", range(60))
def test_round_trip_note1(seed):
    rng = random.Random(seed)
    s = generate_note1(rng.randint(1, 8), seed, rng.randint(1, 10))
    inv = back_substitute(forward_eliminate(s))
    assert matmul(inv.tolist(), s.B.tolist()) == identity(s.n)
    assert inv == integer_inverse(s.B)


def test_derive_boxes():
    assert derive_boxes(WORKED_SYS) == ((-2, 2), (-3, 7), (-23, 2))
    assert derive_boxes(SubstSystem(IntMatrix.zeros(2, 2), 0)) == ((0, 0), (0, 0))
    # 1x1 needs a square matrix; a single row (5, -7) sits in a 2x2
    s = SubstSystem(IntMatrix.of([[5, -7], [0, 1]]), 1)
    assert derive_boxes(s)[0] == (-7, 5)


def test_derive_boxes_with_offset():
    s = SubstSystem(IntMatrix.of([[1, -2], [0, 1]]), 1, (10, -1))
    assert derive_boxes(s) == ((8, 11), (-1, 0))


def test_verify_r1():
    r = verify_r1(WORKED_INST, WORKED_SYS)
    assert r.passed
    assert all(row.instance_box == row.derived_box for row in r.rows)
    wide = SubstInstance(WORKED_INST.a, 2, tuple((lo - 1, hi + 1) for lo, hi in WORKED_INST.boxes))
    assert verify_r1(wide, WORKED_SYS).passed
    raised = WORKED_INST.with_box(0, (-1, 2))
    r = verify_r1(raised, WORKED_SYS)
    assert r.failures() == [1]


@pytest.mark.parametrize("seed", range(20))
def test_r1_against_own_boxes(seed):
    s = generate_note1(1 + seed % 7, seed)
    inst = SubstInstance((1,) * s.n, s.c, derive_boxes(s))
    r = verify_r1(inst, s)
    assert r.passed and all(row.instance_box == row.derived_box for row in r.rows)


def test_cardinality_link():
    r = verify_cardinality_link(WORKED_INST, WORKED_SYS)
    assert r.aB == (1, 1, 1) and r.linked
    ident = SubstSystem(IntMatrix.identity(3), 1)
    r = verify_cardinality_link(SubstInstance((1, 1, 1), 1, ((0, 1),) * 3), ident)
    assert r.aB == (1, 1, 1) and r.linked
    r = verify_cardinality_link(SubstInstance((1, 0, 0), 1, ((0, 1),) * 3), ident)
    assert r.aB == (1, 0, 0) and not r.linked


def test_instance_for_worked():
    assert instance_for(WORKED_SYS) == WORKED_INST


def test_generate_note1_basics():
    assert generate_note1(1, 0).B == IntMatrix.of([[1]])
    s = generate_note1(4, 7, 10)
    forward_eliminate(s)
    assert s.B[0, 0] == 1
    assert generate_note1(4, 7, 10) == s
    # off-pivot entries stay inside the bound
    for i, row in enumerate(s.B.rows):
        assert all(abs(v) <= 10 for j, v in enumerate(row) if j != i)


@pytest.mark.parametrize("seed", range(40))
def test_generators_are_unimodular(seed):
    for make in (generate_note1, generate_descending):
        s = make(1 + seed % 8, seed)
        t = forward_eliminate(s)
        assert all(p in (1, -1) for p in t.pivots)
        assert abs(det(s.B)) == 1
        if s.n <= 6:
            assert abs(cofactor_det(s.B.tolist())) == 1


def test_generate_descending_first_row():
    assert generate_descending(1, 0).B.rows[0] == (1,)
    s = generate_descending(5, 0)
    assert s.B.rows[0] == (1, 2, 4, 8, 16)
    assert is_superincreasing(s.B.rows[0])
    assert not is_superincreasing((1, 2, 3))


@pytest.mark.parametrize("n", range(1, 9))
def test_descending_gives_distinct_y1(n):
    s = generate_descending(n, n)
    for c in range(n + 1):
        y1 = [sum(b * x for b, x in zip(s.B.rows[0], xs))
              for xs in itertools.product((0, 1), repeat=n) if sum(xs) == c]
        assert len(y1) == len(set(y1))


def test_r2_normalize_worked_is_unchanged():
    s = r2_normalize(WORKED_B)
    assert s.B == WORKED_B
    forward_eliminate(s)


def test_r2_normalize_fixes_pivots():
    B = IntMatrix.of([[2, 1], [1, 1]])
    with pytest.raises(NonUnitPivot):
        forward_eliminate(B)
    s = r2_normalize(B)
    assert all(abs(p) == 1 for p in forward_eliminate(s).pivots)
    # same column lattice: B^-1 * result is an integer unimodular matrix
    U = integer_inverse(B) @ s.B
    assert abs(det(U)) == 1


def test_r2_normalize_rejects_det_2():
    with pytest.raises(NotUnimodularEquivalent):
        r2_normalize(IntMatrix.of([[2, 0], [0, 1]]))


@pytest.mark.parametrize("seed", range(30))
def test_r2_normalize_random_unimodular(seed):
    from test_exact import random_unimodular
    rng = random.Random(seed)
    rows = random_unimodular(rng, rng.randint(2, 5))
    B = IntMatrix.of(rows)
    s = r2_normalize(B)
    forward_eliminate(s)
    U = integer_inverse(B) @ s.B
    assert abs(det(U)) == 1
    L, V = column_triangularize(B)
    assert B @ V == L
    assert all(L[i, j] == 0 for i in range(L.shape[0]) for j in range(i + 1, L.shape[0]))


def test_intermediate_size_check():
    t = forward_eliminate(IntMatrix.identity(3))
    assert intermediate_size_check(t, IntMatrix.identity(3)).holds
    r = intermediate_size_check(forward_eliminate(WORKED_SYS), WORKED_B)
    # largest trace coefficient is 17 -> size 7; 4 * size(B) = 188
    assert (r.max_size, r.bound, r.holds) == (7, 188, True)


@pytest.mark.parametrize("seed", range(100))
def test_intermediate_size_note1(seed):
    s = generate_note1(1 + seed % 8, seed, 1 + seed % 10)
    assert intermediate_size_check(forward_eliminate(s), s.B).holds


def test_size_bound_check():
    ident = SubstSystem(IntMatrix.identity(3), 1)
    assert size_bound_check(ident, PolyBound((0, 0, 1)), 10).holds
    lg3 = WORKED_INST.lg3()
    assert lg3 == 53
    r = size_bound_check(WORKED_SYS, PolyBound((0, 0, 1)), lg3)
    assert (r.size_B, r.size_inverse, r.omega, r.holds) == (47, 64, 2809, True)
    assert not size_bound_check(WORKED_SYS, PolyBound((1,)), lg3).holds


@given(st.lists(st.integers(0, 20), min_size=1, max_size=5), st.integers(0, 100))
def test_polybound_monotone(coeffs, x):
    p = PolyBound(tuple(coeffs))
    assert p(x) <= p(x + 1)


def test_instance_validation():
    with pytest.raises(ValueError):
        SubstInstance((1, 2), 0, ((0, 1),))
    with pytest.raises(ValueError):
        SubstInstance((1,), 0, ((2, 1),))
