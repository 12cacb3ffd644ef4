#!/usr/bin/env python3
"""
Conic representation by exact pivoting.

Given generators E and a target x, either writes x as a nonnegative
combination of linearly independent generators or returns a functional
that is nonnegative on E and negative at x. Convex membership, the
halved Newton polytope lattice and the linear Nichtnegativstellensatz
are built on top of it.
"""

import logging
from fractions import Fraction
from itertools import product
from math import comb
from typing import List, Optional, Sequence, Tuple

from errors import CertificateError, DegreeError, DimensionError, InputError, SpanError
from models import ConicResult, LinearNnsResult
from polynomials import MPoly, graded_lex_key
from rational_matrix import nullspace, solve_linear

logger = logging.getLogger(__name__)

Vector = List[Fraction]


def _dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


def _independent_prefix(E: List[Vector]) -> List[int]:
    """Indices of the first linearly independent generators, in index order"""
    chosen: List[int] = []
    for k, e in enumerate(E):
        if not any(e):
            continue
        rows = [E[i] for i in chosen] + [e]
        # e is dependent iff the rows have a nonzero left kernel element
        if not nullspace([[r[c] for r in rows] for c in range(len(e))]):
            chosen.append(k)
    return chosen


def _separating_functional(E: List[Vector], x: Vector) -> Optional[Vector]:
    """A functional vanishing on E with value -1 at x, or None if x is in span(E)"""
    n = len(x)
    if not E:
        norm = _dot(x, x)
        return [-xi / norm for xi in x] if norm else None
    for candidate in nullspace(E, ncols=n):
        value = _dot(candidate, x)
        if value:
            return [-c / value for c in candidate]
    return None


def _verify(E: List[Vector], x: Vector, result: ConicResult):
    if result.variant == 'A':
        combination = [sum((c * E[b][i] for b, c in zip(result.basis, result.coefficients)), Fraction(0))
                       for i in range(len(x))]
        if combination != list(x) or any(c < 0 for c in result.coefficients):
            raise CertificateError("Conic representation failed verification")
    else:
        ell = result.functional
        if any(_dot(ell, e) < 0 for e in E) or _dot(ell, x) >= 0 or any(_dot(ell, E[k]) != 0 for k in result.kernel):
            raise CertificateError("Separating functional failed verification")


def conic_representation(E: Sequence[Sequence], x: Sequence) -> ConicResult:
    """
    Pivot until x has nonnegative coordinates in the current basis or the
    dual functional of the leaving element is nonnegative on all of E.

    Generators are ordered by input index. The iteration runs inside
    span(E); a target outside the span raises SpanError carrying a
    functional that vanishes on E and is -1 at x.
    """
    E = [[Fraction(c) for c in e] for e in E]
    x = [Fraction(c) for c in x]
    if any(len(e) != len(x) for e in E):
        raise DimensionError("Generators and target differ in dimension")

    outside = _separating_functional(E, x)
    if outside is not None:
        raise SpanError("Target lies outside the span of the generators", outside)
    if not any(x):
        return ConicResult('A', basis=(), coefficients=())

    basis = _independent_prefix(E)
    limit = comb(len(E), len(basis)) + 1
    pivots = 0
    while True:
        columns = [[E[b][i] for b in basis] for i in range(len(x))]
        coordinates = solve_linear(columns, x)
        negative = [k for k, c in enumerate(coordinates) if c < 0]
        if not negative:
            result = ConicResult('A', basis=tuple(basis), coefficients=tuple(coordinates), pivots=pivots)
            break
        leaving = min(negative, key=lambda k: basis[k])
        unit = [Fraction(int(k == leaving)) for k in range(len(basis))]
        ell = solve_linear([E[b] for b in basis], unit)
        entering = next((k for k, e in enumerate(E) if _dot(ell, e) < 0), None)
        if entering is None:
            kernel = tuple(b for k, b in enumerate(basis) if k != leaving)
            result = ConicResult('B', functional=tuple(ell), kernel=kernel, pivots=pivots)
            break
        basis = sorted([b for k, b in enumerate(basis) if k != leaving] + [entering])
        pivots += 1
        logger.debug(f"Pivot {pivots}: E[{basis}]")
        if pivots > limit:
            raise CertificateError(f"Pivoting did not terminate after {pivots} steps")

    _verify(E, x, result)
    return result


def convex_membership(S: Sequence[Sequence], alpha: Sequence) -> bool:
    """alpha in conv(S), decided as (alpha, 1) in cone(S x {1})"""
    if not S:
        raise InputError("Empty point set")
    if any(len(s) != len(alpha) for s in S):
        raise DimensionError("Points differ in dimension")
    lifted = [list(s) + [1] for s in S]
    try:
        return conic_representation(lifted, list(alpha) + [1]).is_member
    except SpanError:
        return False


def newton_halved_lattice(f: MPoly) -> List[Tuple[int, ...]]:
    """Lattice points of N(f)/2, graded lex descending"""
    if f.is_zero():
        raise InputError("Newton polytope of the zero polynomial is empty")
    support = f.support()
    low = min(sum(e) for e in support)
    high = max(sum(e) for e in support)
    box = [range((d + 1) // 2 + 1) for d in f.degrees_per_variable()]
    points = []
    for beta in product(*box):
        doubled = [2 * b for b in beta]
        if not low <= sum(doubled) <= high:
            continue
        if convex_membership(support, doubled):
            points.append(tuple(beta))
    logger.debug(f"Halved Newton lattice of {f}: {len(points)} points")
    return sorted(points, key=graded_lex_key, reverse=True)


def newton_vertices(f: MPoly) -> List[Tuple[int, ...]]:
    """Support points that are not in the convex hull of the other support points"""
    support = f.support()
    if len(support) == 1:
        return support
    return [e for k, e in enumerate(support)
            if not convex_membership(support[:k] + support[k + 1:], e)]


def _affine_vector(p: MPoly, nvars: int) -> Vector:
    """(constant, coefficient of x1, ..., coefficient of xn)"""
    if p.degree > 1:
        raise DegreeError(f"{p} is not affine-linear")
    if p.nvars != nvars:
        raise DimensionError(f"Polynomial in {p.nvars} variables, expected {nvars}")
    unit = lambda i: tuple(int(k == i) for k in range(nvars))
    return [p.constant_term()] + [p.coefficient(unit(i)) for i in range(nvars)]


def _spread(result: ConicResult, size: int) -> Tuple[Fraction, ...]:
    coefficients = [Fraction(0)] * size
    for b, c in zip(result.basis, result.coefficients):
        coefficients[b] = c
    return tuple(coefficients)


def _functional_or_none(E: List[Vector], x: Vector) -> Tuple[Optional[ConicResult], Optional[Vector]]:
    try:
        result = conic_representation(E, x)
    except SpanError as e:
        return None, list(e.functional)
    if result.is_member:
        return result, None
    return None, list(result.functional)


def linear_nns(f: MPoly, ls: Sequence[MPoly]) -> LinearNnsResult:
    """
    Decide whether f >= 0 on S = {l >= 0 for l in ls} for affine-linear data.

    Returns a certificate f = c0 + sum c_i l_i with c >= 0, a witness
    point of S where f < 0, or the empty flag with -1 = c0 + sum c_i l_i.
    """
    n = f.nvars
    fv = _affine_vector(f, n)
    E = [[Fraction(1)] + [Fraction(0)] * n] + [_affine_vector(l, n) for l in ls]

    # Farkas: S is empty iff -1 lies in cone{1, l_1, ..., l_m}
    member, psi = _functional_or_none(E, [Fraction(-1)] + [Fraction(0)] * n)
    if member is not None:
        logger.info("Constraint set is empty")
        return LinearNnsResult('empty', coefficients=_spread(member, len(E)))
    feasible = [c / psi[0] for c in psi[1:]]

    # the homogenized data has the same coefficient vectors
    member, phi = _functional_or_none(E, fv)
    if member is not None:
        return LinearNnsResult('certificate', coefficients=_spread(member, len(E)))
    if phi[0] > 0:
        witness = [c / phi[0] for c in phi[1:]]
    else:
        direction = phi[1:]
        slope = _dot(fv[1:], direction)
        value = fv[0] + _dot(fv[1:], feasible)
        step = max(Fraction(0), value / -slope) + 1
        witness = [y + step * d for y, d in zip(feasible, direction)]

    if any(e[0] + _dot(e[1:], witness) < 0 for e in E[1:]) or fv[0] + _dot(fv[1:], witness) >= 0:
        raise CertificateError("Witness failed verification")
    return LinearNnsResult('witness', witness=tuple(witness))
