#!/usr/bin/env python3
"""
Tests for Gram families, the SOS search, exact verification and Cassels descent
"""

import json
import random
from fractions import Fraction

import pytest

from errors import InputError, NoGramError
from models import SosCert
from polynomials import MPoly, UPoly, graded_monomials, parse_poly
from quadratic_forms import is_psd
from rational_matrix import SymMat
from sos_gram import (FOUND, INFEASIBLE, UNKNOWN, cassels_descent, certificate_from_json, certificate_to_json,
                      find_gram, gram_family, newton_obstruction, rational_zeros, verify_sos)

MOTZKIN = "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1"
GRAM_EXAMPLE = "2*x1^4 + 5*x2^4 - x1^2*x2^2 + 2*x1^3*x2"
GRAM_MONOMIALS = [(2, 0), (1, 1), (0, 2)]
TANGENT_EXAMPLE = "x1^4 + x2^4 - 4*x1 + 3"


def p2(text):
    return parse_poly(text, 2)


def motzkin_times_one_plus_x2_cert():
    return SosCert((
        (1, p2("1 - x^2*y^2")),
        (1, p2("x - x*y^2")),
        (1, p2("x*y - x^3*y")),
    ))


def motzkin_cubed_cert():
    three_quarters = Fraction(3, 4)
    return SosCert((
        (1, p2("x^2*y - 1/2*x^4*y^5 - 1/2*x^6*y^3")),
        (1, p2("x*y^2 - 1/2*x^3*y^6 - 1/2*x^5*y^4")),
        (1, p2("1 - 1/2*x^2*y^4 - 1/2*x^4*y^2")),
        (three_quarters, p2("x^2*y^4 - x^4*y^2")),
        (three_quarters, p2("x^3*y^6 - x^5*y^4")),
        (three_quarters, p2("x^4*y^5 - x^6*y^3")),
    ))


def test_gram_family_one_parameter():
    family = gram_family(p2(GRAM_EXAMPLE), GRAM_MONOMIALS)
    assert family.dimension == 1
    for t in (0, 1, Fraction(-7, 3)):
        (G,) = family.point([t])
        assert G[0, 0] == 2 and G[0, 1] == 1 and G[1, 2] == 0 and G[2, 2] == 5
        assert G[1, 1] == -2 * G[0, 2] - 1
    # move to a = -3
    (G0,) = family.G0
    (B,) = family.basis[0]
    t = (Fraction(-3) - G0[0, 2]) / B[0, 2]
    (G,) = family.point([t])
    assert G.to_rows() == [[2, 1, -3], [1, 5, 0], [-3, 0, 5]]
    assert is_psd(G)


def test_gram_family_unique():
    family = gram_family(parse_poly("x^2", 1), [(1,)])
    assert family.unique
    assert family.G0[0].to_rows() == [[1]]


def test_gram_family_motzkin_forced_negative():
    f = p2(MOTZKIN)
    v = [(2, 1), (1, 2), (1, 1), (0, 0)]
    family = gram_family(f, v)
    assert family.unique
    assert family.forced[(0, 2)] == -3


def test_gram_family_missing_exponent():
    with pytest.raises(NoGramError):
        gram_family(parse_poly("x^2 + x", 1), [(1,)])
    with pytest.raises(InputError):
        gram_family(parse_poly("x^2", 1), [])


def test_find_gram_gram_example():
    f = p2(GRAM_EXAMPLE)
    result = find_gram(f)
    assert result.status == FOUND
    assert list(result.monomials) == GRAM_MONOMIALS
    assert is_psd(result.gram[0])
    assert verify_sos(f, (result.gram[0], result.monomials))
    assert result.certificate.expand(2) == f
    assert all(w >= 0 for w, _ in result.certificate.terms)


def test_find_gram_motzkin_infeasible():
    result = find_gram(p2(MOTZKIN))
    assert result.status == INFEASIBLE
    assert result.certificate is None


def test_find_gram_motzkin_multiple():
    f = p2("1 + x^2") * p2(MOTZKIN)
    result = find_gram(f)
    assert result.status in (FOUND, UNKNOWN)
    if result.found:
        assert verify_sos(f, result.certificate)


def test_find_gram_tangent_example():
    f = p2(TANGENT_EXAMPLE)
    result = find_gram(f)
    assert result.status == FOUND
    assert verify_sos(f, result.certificate)
    assert verify_sos(f, (result.gram[0], result.monomials))
    assert all(p((1, 0)) == 0 for _, p in result.certificate.terms)


def test_rational_zeros():
    f = p2(TANGENT_EXAMPLE)
    assert rational_zeros(f, [MPoly.constant(1, 2)]) == [(1, 0)]
    assert rational_zeros(f, [p2("-x1")]) == []
    assert rational_zeros(p2("x1^2 + x2^2 + 1"), []) == []
    assert rational_zeros(p2("x1*x2 - 1/4"), [p2("x1"), p2("x2")]) == [(Fraction(1, 2), Fraction(1, 2))]


def test_find_gram_random_sums_of_squares():
    rng = random.Random(151)
    v = graded_monomials(2, 2)
    for _ in range(5):
        f = MPoly.zero(2)
        for alpha in v:
            f = f + MPoly.monomial(tuple(2 * a for a in alpha))
        for _ in range(rng.randint(1, 3)):
            p = MPoly.zero(2)
            for alpha in v:
                p = p + MPoly.monomial(alpha, rng.randint(-2, 2))
            f = f + p * p
        result = find_gram(f)
        assert result.status == FOUND
        assert verify_sos(f, result.certificate)


def test_newton_obstruction():
    assert newton_obstruction(parse_poly("x^3 + 1", 1)) == 'odd-degree'
    assert newton_obstruction(p2("x^2*y^2 + x")).startswith('odd-vertex')
    assert newton_obstruction(p2("x^4 + y^4 - 1")).startswith('negative-vertex-coefficient')
    assert newton_obstruction(p2(MOTZKIN)) is None


def test_find_gram_newton_shortcuts():
    assert find_gram(parse_poly("x^3 + x", 1)).status == INFEASIBLE
    result = find_gram(p2("x^4 + y^4 - 1"))
    assert result.status == INFEASIBLE
    assert result.reason.startswith('negative-vertex-coefficient')
    with pytest.raises(InputError):
        find_gram(MPoly.zero(2))


def test_verify_sos_known_certificates():
    f = p2(GRAM_EXAMPLE)
    half = Fraction(1, 2)
    cert = SosCert(((half, p2("2*x^2 + x*y - 3*y^2")), (half, p2("3*x*y + y^2"))))
    assert verify_sos(f, cert)

    motzkin = p2(MOTZKIN)
    assert verify_sos(p2("1 + x^2") * motzkin, motzkin_times_one_plus_x2_cert())

    cubed = p2("x^12*y^6 + x^6*y^12 - 3*x^6*y^6 + 1")
    assert verify_sos(cubed, motzkin_cubed_cert())


def test_verify_sos_rejections():
    f = p2(GRAM_EXAMPLE)
    assert verify_sos(f, SosCert(((-1, p2("x")),))).reason == 'negative-weight'
    assert verify_sos(f, SosCert(((1, p2("x^2")),))).reason == 'expansion-mismatch'
    assert verify_sos(f, SosCert(((1, parse_poly("x", 1)),))).reason == 'variable-mismatch'

    not_psd = SymMat.from_rows([[2, 1, 1], [1, -3, 0], [1, 0, 5]])
    assert verify_sos(f, (not_psd, GRAM_MONOMIALS)).reason == 'not-psd'
    assert verify_sos(f, (SymMat.from_rows([[1]]), GRAM_MONOMIALS)).reason == 'dimension-mismatch'
    assert verify_sos(f, ([[2, 1], [0, 1]], [(2, 0), (1, 1)])).reason == 'not-symmetric'
    wrong = SymMat.from_rows([[2, 1, -3], [1, 5, 0], [-3, 0, 6]])
    assert verify_sos(f, (wrong, GRAM_MONOMIALS)).reason == 'gram-mismatch'
    assert verify_sos(f, (SymMat.from_rows([[2, 1, -3], [1, 5, 0], [-3, 0, 5]]), GRAM_MONOMIALS))


def test_certificate_json():
    f = p2(GRAM_EXAMPLE)
    G = SymMat.from_rows([[2, 1, -3], [1, 5, 0], [-3, 0, 5]])
    text = certificate_to_json((G, GRAM_MONOMIALS), target=f)
    data = json.loads(text)
    assert data['gram'][0] == ['2', '1', '-3']
    target, (loaded, v) = certificate_from_json(text, 2)
    assert target == f
    assert verify_sos(target, (loaded, v))

    text = certificate_to_json(SosCert(((Fraction(1, 2), p2("3*x*y + y^2")),)))
    _, cert = certificate_from_json(text, 2)
    assert cert.terms[0][0] == Fraction(1, 2)
    with pytest.raises(InputError):
        certificate_from_json('{"target": "x"}', 1)


def test_cassels_trivial():
    x = UPoly.x()
    cert = cassels_descent([1], [x * x], x)
    assert cert.expand(1) == (x * x).to_mpoly()
    assert cert.terms[0][1] in (x.to_mpoly(), (-x).to_mpoly())


def test_cassels_two_squares():
    x = UPoly.x()
    trace = []
    cert = cassels_descent([1, 1], [x * x + x, x * x - x], x, trace)
    assert cert.expand(1) == parse_poly("2*x^2 + 2", 1)


def test_cassels_not_divisible():
    x = UPoly.x()
    with pytest.raises(InputError):
        cassels_descent([1], [x], x * x)
    with pytest.raises(InputError):
        cassels_descent([-1], [x], x)


def random_upoly(rng, degree):
    return UPoly(tuple(Fraction(rng.randint(-3, 3)) for _ in range(degree + 1)))


def test_cassels_constructed_instances():
    """(c^2 + d^2)(a^2 + b^2)^2 = f1^2 + f2^2 with f1, f2 built from a, b, c, d"""
    rng = random.Random(157)
    done = 0
    while done < 50:
        a, b = random_upoly(rng, rng.randint(0, 2)), random_upoly(rng, rng.randint(0, 2))
        c, d = random_upoly(rng, rng.randint(0, 2)), random_upoly(rng, rng.randint(0, 2))
        g = a * a + b * b
        if g.is_zero():
            continue
        f1 = c * (a * a - b * b) - a * b * d * 2
        f2 = a * b * c * 2 + d * (a * a - b * b)
        weight = Fraction(rng.randint(1, 3))
        trace = []
        cert = cassels_descent([weight, weight], [f1, f2], g, trace)
        h = (c * c + d * d) * weight
        assert cert.expand(1) == h.to_mpoly()
        assert all(later < earlier for earlier, later in zip([g.degree] + trace, trace))
        assert len(trace) <= max(g.degree, 0)
        done += 1
