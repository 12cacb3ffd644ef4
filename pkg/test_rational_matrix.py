#!/usr/bin/env python3
"""
Tests for the exact rational matrix kernels
sympy serves as the independent oracle for determinants
"""

import random
from fractions import Fraction

import pytest
import sympy

from errors import DimensionError, ParseError, SymmetryError
from polynomials import UPoly
from rational_matrix import (Mat, SymMat, charpoly, det, format_rat, nullspace, parse_matrix, parse_rat, rank,
                             solve_linear)


def random_matrix(rng, rows, cols, low=-3, high=3):
    return [[Fraction(rng.randint(low, high)) for _ in range(cols)] for _ in range(rows)]


def random_rational_matrix(rng, rows, cols):
    return [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(cols)] for _ in range(rows)]


def test_parse_rat():
    assert parse_rat("3") == 3
    assert parse_rat("-7/21") == Fraction(-1, 3)
    assert parse_rat(" 4 / 6 ") == Fraction(2, 3)
    assert format_rat(Fraction(6, -4)) == "-3/2"
    assert format_rat(0) == "0"


@pytest.mark.parametrize("text", ["1.5", "1/0", "abc", ""])
def test_parse_rat_rejects(text):
    with pytest.raises(ParseError):
        parse_rat(text)


def test_parse_matrix():
    M = parse_matrix("1,2;3,-1/2")
    assert M.rows == 2 and M.cols == 2
    assert M[1, 1] == Fraction(-1, 2)


def test_det_trivial():
    assert det(Mat.identity(3)) == 1
    assert det([[0, 1], [1, 0]]) == -1
    assert det([[1, 2], [2, 4]]) == 0


def test_det_matches_sympy():
    rng = random.Random(7)
    for n in range(1, 6):
        for _ in range(10):
            rows = random_matrix(rng, n, n)
            assert det(rows) == Fraction(int(sympy.Matrix(rows).det()))


def test_det_rational_entries():
    rng = random.Random(11)
    for _ in range(20):
        rows = random_rational_matrix(rng, 4, 4)
        oracle = sympy.Matrix([[sympy.Rational(e.numerator, e.denominator) for e in r] for r in rows]).det()
        assert det(rows) == Fraction(int(oracle.p), int(oracle.q))


def test_det_multiplicative():
    rng = random.Random(3)
    for n in range(1, 7):
        A = Mat.from_rows(random_matrix(rng, n, n))
        B = Mat.from_rows(random_matrix(rng, n, n))
        assert det(A @ B) == det(A) * det(B)


def test_det_non_square():
    with pytest.raises(DimensionError):
        det([[1, 2, 3], [4, 5, 6]])


def test_charpoly_trivial():
    assert charpoly(Mat.zeros(2, 2)) == UPoly((0, 0, 1))
    assert charpoly(Mat.identity(2)) == UPoly((1, 2, 1))


def test_charpoly_symmetric_example():
    M = [[1, 0, 1], [0, -2, 1], [1, 1, 0]]
    assert charpoly(M, 'minus') == UPoly((1, 4, -1, -1))


def test_charpoly_relations():
    rng = random.Random(5)
    for n in range(1, 6):
        rows = random_matrix(rng, n, n)
        plus = charpoly(rows, 'plus')
        minus = charpoly(rows, 'minus')
        assert plus.degree == n
        assert plus(0) == det(rows)
        assert minus == plus.compose_neg()


def test_charpoly_sign_convention():
    # det(M - X*I) is det(M + Y*I) at Y = -X
    assert charpoly([[1]], 'plus') == UPoly((1, 1))
    assert charpoly([[1]], 'minus') == UPoly((1, -1))
    M = [[2, 1], [1, 3]]
    assert charpoly(M, 'minus') == charpoly(M, 'plus').compose_neg()
    assert charpoly(M, 'minus') == UPoly((5, -5, 1))


def test_charpoly_non_square():
    with pytest.raises(DimensionError):
        charpoly([[1, 2]])


def test_solve_linear():
    assert solve_linear(Mat.identity(2), [3, Fraction(-1, 2)]) == [3, Fraction(-1, 2)]
    assert solve_linear([[1, 1], [2, 2]], [1, 3]) is None


def test_solve_linear_residual():
    rng = random.Random(13)
    for _ in range(20):
        A = random_matrix(rng, 4, 6)
        x0 = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(6)]
        b = Mat.from_rows(A).apply(x0)
        x = solve_linear(A, b)
        assert x is not None
        assert Mat.from_rows(A).apply(x) == b


def test_solve_linear_dimension_mismatch():
    with pytest.raises(DimensionError):
        solve_linear([[1, 0], [0, 1]], [1])


def test_nullspace_and_rank():
    rng = random.Random(17)
    for _ in range(20):
        A = random_matrix(rng, 3, 5, -2, 2)
        basis = nullspace(A)
        assert len(basis) == 5 - rank(A)
        for vector in basis:
            assert all(v == 0 for v in Mat.from_rows(A).apply(vector))
    assert nullspace([], ncols=2) == [[1, 0], [0, 1]]


def test_rank_matches_sympy():
    rng = random.Random(19)
    for _ in range(20):
        rows = random_matrix(rng, 4, 4, -1, 1)
        assert rank(rows) == sympy.Matrix(rows).rank()


def test_exact_arithmetic():
    rng = random.Random(23)
    for _ in range(50):
        a = Fraction(rng.randint(-100, 100), rng.randint(1, 100))
        b = Fraction(rng.randint(-100, 100), rng.randint(1, 100))
        assert (a + b) - b == a


def test_symmat_storage():
    S = SymMat.from_rows([[1, 2, 3], [2, 4, 5], [3, 5, 6]])
    assert S.entries == (1, 2, 3, 4, 5, 6)
    assert S[2, 0] == 3 and S[1, 2] == 5
    assert S.to_mat().is_symmetric()
    assert S.principal_submatrix([0, 2]).to_rows() == [[1, 3], [3, 6]]


def test_symmat_rejects_asymmetric():
    with pytest.raises(SymmetryError):
        SymMat.from_rows([[1, 2], [3, 4]])
    with pytest.raises(DimensionError):
        SymMat.from_rows([[1, 2, 3], [2, 4, 5]])
