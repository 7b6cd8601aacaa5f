from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.exact_linalg import ExactMatrix, ExactMatrixError, combine, gauss_jordan, invert


@st.composite
def small_matrices(draw, size=3):
    entries = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return [[draw(entries) for _ in range(size)] for _ in range(size)]


def test_construction_reduces():
    m = ExactMatrix.of(np.array([[2, 4], [6, 8]]), 4)
    assert m.den == 2
    assert m.entry(0, 0) == Fraction(1, 2)
    assert m.num.dtype == np.int64
    with pytest.raises(ExactMatrixError):
        ExactMatrix.of(np.array([[0.5]]))
    with pytest.raises(ExactMatrixError):
        ExactMatrix(np.zeros(3, dtype=np.int64))


def test_from_fractions_and_back():
    rows = [[Fraction(1, 2), 1], [0, Fraction(1, 3)]]
    m = ExactMatrix.from_fractions(rows)
    assert m.den == 6
    assert m.to_fractions() == rows


def test_matmul_and_sum():
    a = ExactMatrix.from_fractions([[1, 2], [3, 4]])
    half = ExactMatrix.identity(2).scale(Fraction(1, 2))
    assert (a @ half).to_fractions() == [[Fraction(1, 2), 1], [Fraction(3, 2), 2]]
    assert (a - a).is_zero()
    assert a + a == a.scale(2)
    assert -a == a.scale(-1)
    assert combine([Fraction(1), Fraction(-1)], [a, a]).is_zero()
    with pytest.raises(ExactMatrixError):
        a @ ExactMatrix.zeros(3, 3)
    with pytest.raises(ExactMatrixError):
        combine([], [])


def test_kron():
    a = ExactMatrix.from_fractions([[1, 2]])
    b = ExactMatrix.from_fractions([[1], [Fraction(1, 2)]])
    assert a.kron(b).to_fractions() == [[1, 2], [Fraction(1, 2), 1]]
    assert ExactMatrix.identity(2).power_kron(3) == ExactMatrix.identity(8)


def test_overflow_switches_to_python_integers():
    big = ExactMatrix.of(np.array([[1 << 40, 0], [0, 1]], dtype=np.int64))
    square = big @ big
    assert square.num.dtype == object
    assert square.entry(0, 0) == Fraction(1 << 80)
    assert (square + square).entry(0, 0) == Fraction(1 << 81)
    small = ExactMatrix.of(np.array([[3]], dtype=object))
    assert small.num.dtype == np.int64


def test_gauss_jordan_pivots():
    reduced, pivots = gauss_jordan([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert pivots == [0, 1]
    assert gauss_jordan([[1, 2], [2, 4]])[1] == [0]
    assert gauss_jordan([]) == ([], [])


def test_invert():
    inverse = invert([[2, 1], [1, 1]])
    assert inverse == [[1, -1], [-1, 2]]
    with pytest.raises(ExactMatrixError, match="singular"):
        invert([[1, 2], [2, 4]])


def test_matrix_market_dump():
    m = ExactMatrix.from_fractions([[0, Fraction(1, 2)], [3, 0]])
    text = m.to_matrix_market(comment="demo")
    lines = text.splitlines()
    assert lines[0] == "%%MatrixMarket matrix coordinate rational general"
    assert lines[1] == "% demo"
    assert lines[2] == "2 2 2"
    assert lines[3:] == ["1 2 1/2", "2 1 3"]


@settings(max_examples=40)
@given(small_matrices())
def test_inverse_is_two_sided(rows):
    if len(gauss_jordan(rows)[1]) < 3:
        with pytest.raises(ExactMatrixError):
            invert(rows)
        return
    a = ExactMatrix.from_fractions(rows)
    b = ExactMatrix.from_fractions(invert(rows))
    assert a @ b == ExactMatrix.identity(3)
    assert b @ a == ExactMatrix.identity(3)
