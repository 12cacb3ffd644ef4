#!/usr/bin/env python3
"""
Tests for the pivoting conic representation and the pieces built on it
Membership is cross-checked against an exhaustive search over independent subsets
"""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from conic_pivot import conic_representation, convex_membership, linear_nns, newton_halved_lattice, newton_vertices
from errors import DegreeError, DimensionError, SpanError
from polynomials import MPoly, parse_poly
from rational_matrix import rank, solve_linear

MOTZKIN = "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1"
GRAM_EXAMPLE = "2*x1^4 + 5*x2^4 - x1^2*x2^2 + 2*x1^3*x2"


def dot(a, b):
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


def in_cone_by_enumeration(E, x):
    """Caratheodory: x is in cone(E) iff it is a nonnegative combination of independent generators"""
    if not any(x):
        return True
    for size in range(1, len(x) + 1):
        for subset in combinations(range(len(E)), size):
            vectors = [E[k] for k in subset]
            if rank(vectors) != size:
                continue
            coefficients = solve_linear([[v[i] for v in vectors] for i in range(len(x))], x)
            if coefficients is not None and all(c >= 0 for c in coefficients):
                return True
    return False


def random_vector(rng, dim):
    return [Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2])) for _ in range(dim)]


def affine_value(p: MPoly, point):
    return p(point)


def test_conic_standard_basis():
    result = conic_representation([[1, 0], [0, 1]], [1, 1])
    assert result.variant == 'A'
    assert result.basis == (0, 1)
    assert result.coefficients == (1, 1)


def test_conic_separating_functional():
    E = [[1, 0], [0, 1]]
    result = conic_representation(E, [-1, 0])
    assert result.variant == 'B'
    assert all(dot(result.functional, e) >= 0 for e in E)
    assert dot(result.functional, [-1, 0]) < 0
    assert result.kernel == (1,)
    assert dot(result.functional, E[1]) == 0


def test_conic_zero_target():
    result = conic_representation([[1, 2]], [0, 0])
    assert result.is_member and result.coefficients == ()


def test_conic_outside_span():
    with pytest.raises(SpanError) as info:
        conic_representation([[1, 0, 0], [0, 1, 0]], [0, 0, 2])
    functional = info.value.functional
    assert dot(functional, [0, 0, 2]) == -1
    assert dot(functional, [1, 0, 0]) == 0 and dot(functional, [0, 1, 0]) == 0
    with pytest.raises(SpanError):
        conic_representation([], [1, 0])


def test_conic_dimension_mismatch():
    with pytest.raises(DimensionError):
        conic_representation([[1, 0], [0, 1, 1]], [1, 1])


def test_conic_random_against_enumeration():
    rng = random.Random(131)
    for _ in range(500):
        E = [random_vector(rng, 3) for _ in range(rng.randint(1, 8))]
        x = random_vector(rng, 3)
        try:
            result = conic_representation(E, x)
        except SpanError as e:
            assert not in_cone_by_enumeration(E, x)
            assert dot(e.functional, x) == -1
            assert all(dot(e.functional, v) == 0 for v in E)
            continue
        assert result.is_member == in_cone_by_enumeration(E, x)
        if result.is_member:
            assert all(c >= 0 for c in result.coefficients)
            assert rank([E[b] for b in result.basis]) == len(result.basis)
            combination = [sum((c * E[b][i] for b, c in zip(result.basis, result.coefficients)), Fraction(0))
                           for i in range(3)]
            assert combination == x
        else:
            assert all(dot(result.functional, e) >= 0 for e in E)
            assert dot(result.functional, x) < 0
            assert all(dot(result.functional, E[k]) == 0 for k in result.kernel)
            if result.kernel:
                assert rank([E[k] for k in result.kernel]) == len(result.kernel)


def test_convex_membership():
    assert convex_membership([(0,), (2,)], (1,))
    triangle = [(4, 2), (2, 4), (0, 0)]
    assert convex_membership(triangle, (2, 2))
    assert not convex_membership(triangle, (3, 0))
    with pytest.raises(DimensionError):
        convex_membership(triangle, (1, 1, 1))


def test_convex_membership_against_barycentric():
    rng = random.Random(137)
    for _ in range(50):
        S = [tuple(rng.randint(0, 4) for _ in range(2)) for _ in range(rng.randint(1, 4))]
        alpha = tuple(rng.randint(0, 4) for _ in range(2))
        lifted = [list(s) + [1] for s in S]
        assert convex_membership(S, alpha) == in_cone_by_enumeration(lifted, list(alpha) + [1])


def test_newton_halved_lattice_examples():
    assert newton_halved_lattice(parse_poly(MOTZKIN, 2)) == [(2, 1), (1, 2), (1, 1), (0, 0)]
    assert newton_halved_lattice(parse_poly(GRAM_EXAMPLE, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert newton_halved_lattice(MPoly.constant(7, 3)) == [(0, 0, 0)]


def test_newton_halved_lattice_of_square():
    rng = random.Random(139)
    for _ in range(10):
        f = MPoly.zero(2)
        for _ in range(3):
            f = f + MPoly.monomial((rng.randint(0, 2), rng.randint(0, 2)), rng.randint(1, 3))
        lattice = set(newton_halved_lattice(f * f))
        assert set(f.terms) <= lattice


def test_newton_vertices():
    assert set(newton_vertices(parse_poly(MOTZKIN, 2))) == {(4, 2), (2, 4), (0, 0)}


def test_linear_nns_examples():
    x = parse_poly("x", 1)
    result = linear_nns(x, [x])
    assert result.kind == 'certificate' and result.coefficients == (0, 1)

    result = linear_nns(parse_poly("1 + x", 1), [x, -x])
    assert result.kind == 'certificate' and result.coefficients == (1, 1, 0)

    result = linear_nns(parse_poly("-1", 1), [x])
    assert result.kind == 'witness' and result.witness == (0,)


def test_linear_nns_unbounded_witness():
    x = parse_poly("x", 1)
    result = linear_nns(-x, [x])
    assert result.kind == 'witness'
    assert result.witness[0] >= 0 and -result.witness[0] < 0


def test_linear_nns_empty():
    x = parse_poly("x", 1)
    ls = [parse_poly("-1 - x", 1), x]
    result = linear_nns(x, ls)
    assert result.kind == 'empty'
    c = result.coefficients
    assert all(ci >= 0 for ci in c)
    assert c[0] + c[1] * ls[0] + c[2] * ls[1] == MPoly.constant(-1, 1)


def test_linear_nns_rejects_nonlinear():
    with pytest.raises(DegreeError):
        linear_nns(parse_poly("x^2", 1), [])


def test_linear_nns_random():
    rng = random.Random(149)
    for _ in range(60):
        def affine():
            return MPoly(2, {(0, 0): rng.randint(-3, 3), (1, 0): rng.randint(-2, 2), (0, 1): rng.randint(-2, 2)})
        f = affine()
        ls = [affine() for _ in range(rng.randint(0, 4))]
        result = linear_nns(f, ls)
        if result.kind == 'witness':
            assert all(affine_value(l, result.witness) >= 0 for l in ls)
            assert affine_value(f, result.witness) < 0
            continue
        c = result.coefficients
        assert all(ci >= 0 for ci in c)
        total = MPoly.constant(c[0], 2)
        for ci, l in zip(c[1:], ls):
            total = total + l.scale(ci)
        assert total == (f if result.kind == 'certificate' else MPoly.constant(-1, 2))
