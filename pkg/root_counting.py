#!/usr/bin/env python3
"""
Real root counting for univariate rational polynomials.

Hermite forms give exact counts of real and distinct complex roots,
optionally restricted by sign conditions; Descartes' rule gives bounds
(and exact counts for real-rooted input).
"""

import logging
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import List, Sequence, Tuple

from errors import ConsistencyError, EmptyFormError, InputError, NotMonicError, PreconditionError, UndefinedCountError
from models import HermiteData
from polynomials import UPoly
from quadratic_forms import diagonalize
from rational_matrix import Mat, SymMat

logger = logging.getLogger(__name__)


def companion(f: UPoly) -> Mat:
    """Matrix of multiplication by X on Q[X]/(f) in the power basis"""
    if f.is_zero() or f.leading_coefficient != 1:
        raise NotMonicError(f"Companion matrix needs a monic polynomial, got {f}")
    d = f.degree
    rows = [[Fraction(0)] * d for _ in range(d)]
    for i in range(1, d):
        rows[i][i - 1] = Fraction(1)
    for i in range(d):
        rows[i][d - 1] = -f.coeffs[i]
    return Mat.from_rows(rows) if d else Mat(0, 0, ())


def _times_companion(m: List[List[Fraction]], f: UPoly) -> List[List[Fraction]]:
    """m * C_f using the sparsity of the companion matrix"""
    d = len(m)
    out = []
    for row in m:
        shifted = row[1:]
        last = -sum((row[k] * f.coeffs[k] for k in range(d)), Fraction(0))
        out.append(shifted + [last])
    return out


def _evaluate_at_companion(g: UPoly, f: UPoly) -> List[List[Fraction]]:
    """g(C_f) by Horner after reducing g mod f"""
    d = f.degree
    reduced = g % f
    result = [[Fraction(0)] * d for _ in range(d)]
    for c in reversed(reduced.coeffs):
        result = _times_companion(result, f)
        for i in range(d):
            result[i][i] += c
    return result


def hermite_form(f: UPoly, g: UPoly = None) -> HermiteData:
    """Hankel matrix H[i][j] = tr(g(C_f) C_f^(i+j)), 0-based indices"""
    g = g if g is not None else UPoly.constant(1)
    if f.is_zero() or f.leading_coefficient != 1:
        raise NotMonicError(f"Hermite form needs a monic polynomial, got {f}")
    d = f.degree
    if d < 1:
        raise EmptyFormError("Hermite form of a constant polynomial is empty")

    power = _evaluate_at_companion(g, f)
    traces = []
    for _ in range(2 * d - 1):
        traces.append(sum((power[i][i] for i in range(d)), Fraction(0)))
        power = _times_companion(power, f)
    H = SymMat(d, tuple(traces[i + j] for i in range(d) for j in range(i, d)))
    return HermiteData(f=f, g=g, H=H, traces=tuple(traces))


def _normalized(f: UPoly) -> UPoly:
    if f.is_zero():
        raise UndefinedCountError("Root counts of the zero polynomial are undefined")
    return f.monic()


def count_real_roots(f: UPoly) -> int:
    f = _normalized(f)
    if f.degree == 0:
        return 0
    return diagonalize(hermite_form(f).H).signature


def count_complex_distinct(f: UPoly) -> int:
    f = _normalized(f)
    if f.degree == 0:
        return 0
    return diagonalize(hermite_form(f).H).rank


def count_real_with_signs(f: UPoly, gs: Sequence[UPoly]) -> int:
    """Number of real roots x of f with g(x) > 0 for every g in gs"""
    f = _normalized(f)
    if f.degree == 0:
        return 0
    total = 0
    for alpha in product((1, 2), repeat=len(gs)):
        g = reduce(lambda acc, pair: acc * (pair[0] ** pair[1]), zip(gs, alpha), UPoly.constant(1))
        total += diagonalize(hermite_form(f, g).H).signature
    count, rest = divmod(total, 2 ** len(gs))
    if rest:
        raise ConsistencyError(f"Signature sum {total} not divisible by {2 ** len(gs)}")
    logger.debug(f"{count} real roots of {f} satisfy {len(gs)} sign conditions")
    return count


def sign_changes(f: UPoly) -> int:
    return f.sign_changes()


def positive_root_count_bound(f: UPoly) -> Tuple[int, int]:
    """(sigma(f), parity); the number of positive roots is at most sigma(f) and has its parity"""
    sigma = f.sign_changes()
    return sigma, sigma % 2


def is_real_rooted(f: UPoly) -> bool:
    """All complex roots are real, i.e. rank H(f) = signature H(f)"""
    f = _normalized(f)
    if f.degree == 0:
        return True
    congruence = diagonalize(hermite_form(f).H)
    return congruence.rank == congruence.signature


def count_positive_roots_realrooted(f: UPoly) -> int:
    """Exact number of positive roots with multiplicity; f must be real-rooted"""
    if not is_real_rooted(f):
        raise PreconditionError(f"{f} is not real-rooted")
    return f.sign_changes()


def decide_strict_system(gs: Sequence[UPoly]) -> bool:
    """Whether some real x has g(x) > 0 for all g in gs"""
    if any(g.is_zero() for g in gs):
        raise InputError("Zero polynomial in a strict system")
    g = reduce(lambda acc, h: acc * h, gs, UPoly.constant(1))
    f = (1 - g * g) * g.derivative()
    if f.is_zero():
        # every g_i is constant
        return all(h(0) > 0 for h in gs)
    return count_real_with_signs(f, gs) > 0
