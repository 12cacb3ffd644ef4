#!/usr/bin/env python3
"""
Exact rational scalars and dense rational matrices.

All kernels work over Fraction. Determinants and linear systems go through a
fraction-free (Bareiss) echelon form on integer-scaled rows, so intermediate
entries stay integral and exactly divisible.
"""

import re
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm, prod
from typing import List, Optional, Sequence, Tuple

from errors import DimensionError, ParseError, SymmetryError

logger = logging.getLogger(__name__)

Rat = Fraction

RAT_PATTERN = re.compile(r'^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$')


def parse_rat(text) -> Fraction:
    """Parse "p/q" or "p"; decimal points are rejected"""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    match = RAT_PATTERN.match(str(text))
    if not match:
        position = next((i for i, ch in enumerate(str(text)) if ch == '.'), 0)
        raise ParseError(f"Invalid rational '{text}'", position)
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) else 1
    if denominator == 0:
        raise ParseError(f"Zero denominator in '{text}'", str(text).index('/'))
    return Fraction(numerator, denominator)


def format_rat(value) -> str:
    return str(Fraction(value))


@dataclass(frozen=True)
class Mat:
    """Dense row-major rational matrix"""
    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}")
        object.__setattr__(self, 'entries', tuple(Fraction(e) for e in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> 'Mat':
        rows = [list(r) for r in rows]
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise DimensionError("Ragged rows")
        return cls(len(rows), width, tuple(e for r in rows for e in r))

    @classmethod
    def identity(cls, n: int) -> 'Mat':
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'Mat':
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        i, j = key
        return self.entries[i * self.cols + j]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> List[Fraction]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def column(self, j: int) -> List[Fraction]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> List[List[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> 'Mat':
        return Mat.from_rows([self.column(j) for j in range(self.cols)]) if self.rows else Mat(self.cols, 0, ())

    def _check_same_shape(self, other: 'Mat'):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError(f"Shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: 'Mat') -> 'Mat':
        self._check_same_shape(other)
        return Mat(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: 'Mat') -> 'Mat':
        self._check_same_shape(other)
        return Mat(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> 'Mat':
        return Mat(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> 'Mat':
        c = Fraction(c)
        return Mat(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: 'Mat') -> 'Mat':
        if self.cols != other.rows:
            raise DimensionError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        columns = [other.column(j) for j in range(other.cols)]
        return Mat.from_rows([[sum((a * b for a, b in zip(self.row(i), col)), Fraction(0)) for col in columns]
                              for i in range(self.rows)]) if self.rows else Mat(0, other.cols, ())

    def apply(self, vector: Sequence) -> List[Fraction]:
        if len(vector) != self.cols:
            raise DimensionError(f"Vector of length {len(vector)} for {self.cols} columns")
        return [sum((a * Fraction(b) for a, b in zip(self.row(i), vector)), Fraction(0)) for i in range(self.rows)]

    def trace(self) -> Fraction:
        if not self.is_square:
            raise DimensionError("Trace of a non-square matrix")
        return sum((self[i, i] for i in range(self.rows)), Fraction(0))

    def is_symmetric(self) -> bool:
        return self.is_square and all(self[i, j] == self[j, i] for i in range(self.rows) for j in range(i))


@dataclass(frozen=True)
class SymMat:
    """Symmetric rational matrix stored as its upper triangle, row by row"""
    dim: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.dim * (self.dim + 1) // 2:
            raise DimensionError(f"Symmetric {self.dim}x{self.dim} matrix needs {self.dim * (self.dim + 1) // 2} entries")
        object.__setattr__(self, 'entries', tuple(Fraction(e) for e in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> 'SymMat':
        return cls.from_mat(Mat.from_rows(rows))

    @classmethod
    def from_mat(cls, matrix: Mat) -> 'SymMat':
        if not matrix.is_square:
            raise DimensionError(f"Symmetric matrix must be square, got {matrix.rows}x{matrix.cols}")
        if not matrix.is_symmetric():
            raise SymmetryError("Matrix is not symmetric")
        n = matrix.rows
        return cls(n, tuple(matrix[i, j] for i in range(n) for j in range(i, n)))

    @classmethod
    def zeros(cls, n: int) -> 'SymMat':
        return cls(n, (0,) * (n * (n + 1) // 2))

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        i, j = key
        if i > j:
            i, j = j, i
        return self.entries[i * self.dim - i * (i - 1) // 2 + (j - i)]

    def to_rows(self) -> List[List[Fraction]]:
        return [[self[i, j] for j in range(self.dim)] for i in range(self.dim)]

    def to_mat(self) -> Mat:
        return Mat.from_rows(self.to_rows()) if self.dim else Mat(0, 0, ())

    def __add__(self, other: 'SymMat') -> 'SymMat':
        if self.dim != other.dim:
            raise DimensionError("Dimension mismatch")
        return SymMat(self.dim, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def scale(self, c) -> 'SymMat':
        c = Fraction(c)
        return SymMat(self.dim, tuple(c * a for a in self.entries))

    def principal_submatrix(self, indices: Sequence[int]) -> 'SymMat':
        indices = list(indices)
        return SymMat(len(indices), tuple(self[indices[a], indices[b]]
                                          for a in range(len(indices)) for b in range(a, len(indices))))


def parse_matrix(text: str) -> Mat:
    """Parse rows separated by ';' with comma-separated rational entries"""
    rows = []
    for chunk in text.split(';'):
        if chunk.strip():
            rows.append([parse_rat(item) for item in chunk.split(',')])
    return Mat.from_rows(rows)


def _as_rows(matrix) -> List[List[Fraction]]:
    if isinstance(matrix, Mat):
        return matrix.to_rows()
    if isinstance(matrix, SymMat):
        return matrix.to_rows()
    return [[Fraction(e) for e in row] for row in matrix]


def _integer_row(row: Sequence[Fraction]) -> Tuple[List[int], int]:
    """Scale a rational row to integers; returns (row, scale)"""
    scale = lcm(*(Fraction(q).denominator for q in row)) if row else 1
    return [int(Fraction(q) * scale) for q in row], scale


def fraction_free_echelon(rows: List[List[int]]) -> Tuple[List[List[int]], List[int], int]:
    """
    Bareiss elimination on an integer matrix.

    Returns the echelon rows, the pivot columns and the sign of the row
    permutation. After k pivots every entry below the pivot rows is a
    (k+1)-minor of the input, so the division by the previous pivot is exact.
    """
    a = [list(r) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots: List[int] = []
    previous = 1
    sign = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
            sign = -sign
        pivot = a[r][c]
        for i in range(r + 1, nrows):
            factor = a[i][c]
            row_i = a[i]
            row_r = a[r]
            for j in range(c + 1, ncols):
                row_i[j] = (pivot * row_i[j] - factor * row_r[j]) // previous
            row_i[c] = 0
        previous = pivot
        pivots.append(c)
        r += 1
    return a, pivots, sign


def det(matrix) -> Fraction:
    """Exact determinant via fraction-free elimination"""
    rows = _as_rows(matrix)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionError("Determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    scaled = [_integer_row(r) for r in rows]
    echelon, pivots, sign = fraction_free_echelon([r for r, _ in scaled])
    if len(pivots) < n:
        return Fraction(0)
    return Fraction(sign * echelon[n - 1][n - 1], prod(s for _, s in scaled))


def _back_substitute(echelon: List[List[int]], pivots: List[int], nvars: int,
                     rhs_column: Optional[int], free_values: dict) -> List[Fraction]:
    x = [Fraction(0)] * nvars
    for col, value in free_values.items():
        x[col] = Fraction(value)
    for k in range(len(pivots) - 1, -1, -1):
        c = pivots[k]
        row = echelon[k]
        total = Fraction(row[rhs_column]) if rhs_column is not None else Fraction(0)
        for j in range(c + 1, nvars):
            if row[j]:
                total -= row[j] * x[j]
        x[c] = total / row[c]
    return x


def solve_linear(matrix, b: Sequence) -> Optional[List[Fraction]]:
    """One exact solution of A x = b, or None when inconsistent (free variables set to 0)"""
    rows = _as_rows(matrix)
    if len(rows) != len(b):
        raise DimensionError(f"{len(rows)} equations but right-hand side of length {len(b)}")
    nvars = len(rows[0]) if rows else 0
    if not rows:
        return []
    augmented = [_integer_row(list(r) + [Fraction(bi)])[0] for r, bi in zip(rows, b)]
    echelon, pivots, _ = fraction_free_echelon(augmented)
    if pivots and pivots[-1] == nvars:
        return None
    return _back_substitute(echelon, pivots, nvars, nvars, {})


def nullspace(matrix, ncols: Optional[int] = None) -> List[List[Fraction]]:
    """Exact basis of {x : A x = 0}, one vector per free column"""
    rows = _as_rows(matrix)
    nvars = len(rows[0]) if rows else (ncols or 0)
    if not rows:
        return [[Fraction(int(i == j)) for i in range(nvars)] for j in range(nvars)]
    echelon, pivots, _ = fraction_free_echelon([_integer_row(r)[0] for r in rows])
    pivot_set = set(pivots)
    basis = []
    for free in range(nvars):
        if free in pivot_set:
            continue
        values = {f: int(f == free) for f in range(nvars) if f not in pivot_set}
        basis.append(_back_substitute(echelon, pivots, nvars, None, values))
    return basis


def rank(matrix) -> int:
    rows = _as_rows(matrix)
    if not rows:
        return 0
    _, pivots, _ = fraction_free_echelon([_integer_row(r)[0] for r in rows])
    return len(pivots)


def charpoly(matrix, sign: str = 'plus'):
    """
    Characteristic polynomial by Faddeev-LeVerrier.

    sign='plus' gives det(M + X*I), sign='minus' gives det(M - X*I).
    """
    from polynomials import UPoly

    rows = _as_rows(matrix)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionError("Characteristic polynomial of a non-square matrix")
    if sign not in ('plus', 'minus'):
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")

    # det(X*I - A) with A = -M for 'plus' and A = M for 'minus'
    a = [[-e for e in r] for r in rows] if sign == 'plus' else rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m_k = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        product = [[sum((a[i][l] * m_k[l][j] for l in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
        for i in range(n):
            product[i][i] += coeffs[n - k + 1]
        m_k = product
        trace = sum((a[i][l] * m_k[l][i] for i in range(n) for l in range(n)), Fraction(0))
        coeffs[n - k] = -trace / k
    if sign == 'minus' and n % 2 == 1:
        coeffs = [-c for c in coeffs]
    return UPoly(tuple(coeffs))
