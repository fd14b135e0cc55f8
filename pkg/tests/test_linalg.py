from __future__ import annotations

import random
from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from pmainv import linalg
from pmainv.symbolic import X, Y, RationalFn

entries = st.integers(-5, 5).map(Fraction)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(entries, min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_matches_sympy(rows):
    assert linalg.rank(rows) == sympy.Matrix(rows).rank()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(entries, min_size=4, max_size=4), min_size=4, max_size=4))
def test_determinant_matches_sympy(rows):
    assert linalg.determinant(rows) == sympy.Matrix(rows).det()


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(entries, min_size=5, max_size=5), min_size=5, max_size=5),
    st.lists(st.integers(-4, 4).filter(bool), min_size=5, max_size=5),
)
def test_row_scaling_preserves_rank(rows, scales):
    scaled = [[s * v for v in r] for s, r in zip(scales, rows)]
    assert linalg.rank(scaled) == linalg.rank(rows)


def test_rank_mod_p_bounds_rational_rank():
    rng = random.Random(3)
    p = 101
    for _ in range(50):
        rows = [[rng.randint(-30, 30) for _ in range(5)] for _ in range(5)]
        assert linalg.rank_mod_p(rows, p) <= linalg.rank(rows)
    assert linalg.rank_mod_p([[101, 0], [0, 0]], 101) == 0
    assert linalg.rank([[101, 0], [0, 0]]) == 1


def test_rank_over_function_field():
    rows = [[X, Y], [X * X, X * Y]]
    assert linalg.rank(rows) == 1
    assert linalg.rank([[X, Y], [Y, X]]) == 2


def test_solve():
    rows = [[1, 0, 1], [0, 1, 1]]
    x = linalg.solve([[Fraction(v) for v in r] for r in rows], [Fraction(2), Fraction(3), Fraction(5)])
    assert x == [2, 3]
    assert linalg.solve([[Fraction(1), Fraction(0)]], [Fraction(0), Fraction(1)]) is None


def test_determinant_of_functions():
    d = linalg.determinant([[X, RationalFn(1)], [RationalFn(1), Y]])
    assert d == X * Y - 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(entries, min_size=5, max_size=5), min_size=1, max_size=4))
def test_full_pivoting_rank(rows):
    red, piv = linalg.row_echelon(rows, full=True)
    assert len(piv) == sympy.Matrix(rows).rank()
    assert len({c for _, c in piv}) == len(piv)


def test_full_pivoting_prefers_constants():
    from pmainv.symbolic import P, Q

    red, piv = linalg.row_echelon([[-P, -Q, RationalFn(1), 0, 0], [0, RationalFn(-1), 0, 0, 0]], full=True)
    assert all(red[i][j].is_constant() for i, j in piv)
