#!/usr/bin/env python3
"""
Exact univariate and multivariate polynomials over the rationals,
plus the text parser and the canonical printer.
"""

import re
import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from config import Config
from errors import DegreeError, DimensionError, ParseError, UndefinedCountError, UnknownVariableError
from rational_matrix import format_rat

logger = logging.getLogger(__name__)

# deg(0); compares below every integer
NEG_INF = float('-inf')

Exponent = Tuple[int, ...]


@dataclass(frozen=True)
class UPoly:
    """Dense univariate polynomial, coeffs[i] is the coefficient of X^i"""
    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, 'coeffs', tuple(coeffs))

    @classmethod
    def constant(cls, c) -> 'UPoly':
        return cls((Fraction(c),))

    @classmethod
    def x(cls) -> 'UPoly':
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> 'UPoly':
        result = cls.constant(lead)
        for r in roots:
            result = result * cls((-Fraction(r), 1))
        return result

    @property
    def degree(self) -> Union[int, float]:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def _coerce(self, other) -> 'UPoly':
        if isinstance(other, UPoly):
            return other
        if isinstance(other, (int, Rational)):
            return UPoly.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> 'UPoly':
        return UPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return UPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> 'UPoly':
        if k < 0:
            raise ValueError("Negative power")
        result, base = UPoly.constant(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other: 'UPoly') -> Tuple['UPoly', 'UPoly']:
        if other.is_zero():
            raise ZeroDivisionError("Polynomial division by zero")
        remainder = list(self.coeffs)
        dg = len(other.coeffs) - 1
        lead = other.coeffs[-1]
        quotient = [Fraction(0)] * max(len(remainder) - dg, 0)
        for k in range(len(remainder) - 1 - dg, -1, -1):
            q = remainder[k + dg] / lead
            quotient[k] = q
            if q:
                for j, b in enumerate(other.coeffs):
                    remainder[k + j] -= q * b
        return UPoly(tuple(quotient)), UPoly(tuple(remainder[:dg]))

    def __floordiv__(self, other: 'UPoly') -> 'UPoly':
        return divmod(self, other)[0]

    def __mod__(self, other: 'UPoly') -> 'UPoly':
        return divmod(self, other)[1]

    def exact_div(self, other: 'UPoly') -> Optional['UPoly']:
        """Quotient when other divides self, else None"""
        q, r = divmod(self, other)
        return q if r.is_zero() else None

    def monic(self) -> 'UPoly':
        if self.is_zero():
            return self
        lead = self.leading_coefficient
        return UPoly(tuple(c / lead for c in self.coeffs))

    def derivative(self) -> 'UPoly':
        return UPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def compose_neg(self) -> 'UPoly':
        """f(-X)"""
        return UPoly(tuple(-c if i % 2 else c for i, c in enumerate(self.coeffs)))

    def __call__(self, x):
        total = Fraction(0) if isinstance(x, (int, Rational)) else 0
        for c in reversed(self.coeffs):
            total = total * x + c
        return total

    def sign_changes(self) -> int:
        """Number of sign changes in the sequence of nonzero coefficients"""
        if self.is_zero():
            raise UndefinedCountError("Sign changes of the zero polynomial are undefined")
        signs = [c > 0 for c in self.coeffs if c != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def to_mpoly(self) -> 'MPoly':
        return MPoly(1, {(i,): c for i, c in enumerate(self.coeffs) if c})

    def __str__(self) -> str:
        return format_poly(self.to_mpoly())


def _check_exponent(e: Exponent):
    limit = Config.MAX_DEGREE_PER_VARIABLE
    if any(k > limit for k in e):
        raise DegreeError(f"Exponent {max(e)} exceeds the per-variable bound {limit}")
    if any(k < 0 for k in e):
        raise DegreeError(f"Negative exponent in {e}")


@dataclass(frozen=True)
class MPoly:
    """Sparse polynomial in nvars variables: exponent vector -> nonzero coefficient"""
    nvars: int
    terms: Dict[Exponent, Fraction]

    def __post_init__(self):
        clean = {}
        for exp, c in dict(self.terms).items():
            exp = tuple(int(k) for k in exp)
            if len(exp) != self.nvars:
                raise DimensionError(f"Exponent {exp} has length {len(exp)}, expected {self.nvars}")
            c = Fraction(c)
            if c:
                _check_exponent(exp)
                clean[exp] = clean.get(exp, Fraction(0)) + c
        object.__setattr__(self, 'terms', {e: c for e, c in clean.items() if c})

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    @classmethod
    def zero(cls, nvars: int) -> 'MPoly':
        return cls(nvars, {})

    @classmethod
    def constant(cls, c, nvars: int) -> 'MPoly':
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def monomial(cls, exp: Sequence[int], c=1) -> 'MPoly':
        return cls(len(exp), {tuple(exp): Fraction(c)})

    @classmethod
    def variable(cls, i: int, nvars: int) -> 'MPoly':
        """The variable x_i, 1-based"""
        if not 1 <= i <= nvars:
            raise DimensionError(f"Variable index {i} outside 1..{nvars}")
        return cls.monomial(tuple(int(k == i - 1) for k in range(nvars)))

    @property
    def degree(self) -> Union[int, float]:
        return max((sum(e) for e in self.terms), default=NEG_INF)

    def degrees_per_variable(self) -> Tuple[int, ...]:
        return tuple(max((e[i] for e in self.terms), default=0) for i in range(self.nvars))

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exp), Fraction(0))

    def support(self) -> List[Exponent]:
        return sorted(self.terms, key=graded_lex_key, reverse=True)

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * self.nvars)

    def _coerce(self, other) -> 'MPoly':
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise DimensionError(f"Polynomials in {self.nvars} and {other.nvars} variables")
            return other
        if isinstance(other, (int, Rational)):
            return MPoly.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return MPoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> 'MPoly':
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return MPoly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> 'MPoly':
        if k < 0:
            raise ValueError("Negative power")
        result = MPoly.constant(1, self.nvars)
        for _ in range(k):
            result = result * self
        return result

    def scale(self, c) -> 'MPoly':
        c = Fraction(c)
        return MPoly(self.nvars, {e: c * v for e, v in self.terms.items()})

    def derivative(self, i: int) -> 'MPoly':
        """Formal partial derivative with respect to x_i, 1-based"""
        if not 1 <= i <= self.nvars:
            raise DimensionError(f"Variable index {i} outside 1..{self.nvars}")
        k = i - 1
        terms = {}
        for e, c in self.terms.items():
            if e[k]:
                lowered = e[:k] + (e[k] - 1,) + e[k + 1:]
                terms[lowered] = c * e[k]
        return MPoly(self.nvars, terms)

    def __call__(self, point: Sequence):
        return eval_poly(self, point)

    def to_upoly(self) -> UPoly:
        if self.nvars != 1:
            raise DimensionError(f"Expected a univariate polynomial, got {self.nvars} variables")
        d = self.degree
        if d == NEG_INF:
            return UPoly()
        return UPoly(tuple(self.coefficient((i,)) for i in range(d + 1)))

    def __str__(self) -> str:
        return format_poly(self)


def graded_lex_key(exp: Exponent):
    """Sort key for graded lex order, x1 > x2 > ... within a degree"""
    return (sum(exp), exp)


def graded_monomials(nvars: int, degree: int) -> List[Exponent]:
    """All exponents of total degree <= degree, ascending degree, lex-descending within a degree"""
    found: List[Exponent] = []

    def extend(prefix: Exponent, remaining: int):
        if len(prefix) == nvars:
            found.append(prefix)
            return
        for k in range(remaining, -1, -1):
            extend(prefix + (k,), remaining - k)

    extend((), degree)
    return sorted(found, key=lambda e: (sum(e), tuple(-k for k in e)))


def eval_poly(f: MPoly, point: Sequence):
    """Exact evaluation of f at a rational point"""
    if len(point) != f.nvars:
        raise DimensionError(f"Point of length {len(point)} for {f.nvars} variables")
    values = [Fraction(p) if isinstance(p, (int, Rational)) else p for p in point]
    total = Fraction(0) if all(isinstance(v, Fraction) for v in values) else 0.0
    for e, c in f.terms.items():
        term = c if isinstance(total, Fraction) else float(c)
        for v, k in zip(values, e):
            if k:
                term = term * v ** k
        total += term
    return total


def compose_neg(f: UPoly) -> UPoly:
    return f.compose_neg()


def derivative(f: MPoly, i: int) -> MPoly:
    return f.derivative(i)


def leading_form(f: MPoly) -> MPoly:
    """Sum of the terms of top total degree; lf(0) = 0"""
    d = f.degree
    return MPoly(f.nvars, {e: c for e, c in f.terms.items() if sum(e) == d})


def homogenize(f: MPoly) -> MPoly:
    """f* in X0, X1..Xn; X0 is exponent slot 0 and 0* = 0"""
    if f.is_zero():
        return MPoly.zero(f.nvars + 1)
    d = f.degree
    return MPoly(f.nvars + 1, {(d - sum(e),) + e: c for e, c in f.terms.items()})


def dehomogenize(f: MPoly) -> MPoly:
    """Set X0 = 1 in a polynomial whose exponent slot 0 is X0"""
    if f.nvars < 1:
        raise DimensionError("Nothing to dehomogenize")
    terms: Dict[Exponent, Fraction] = {}
    for e, c in f.terms.items():
        terms[e[1:]] = terms.get(e[1:], Fraction(0)) + c
    return MPoly(f.nvars - 1, terms)


def gcd_upoly(f: UPoly, g: UPoly) -> UPoly:
    """Monic gcd by the Euclidean algorithm; gcd(0, 0) = 0"""
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def _variable_name(i: int, nvars: int) -> str:
    return 'x' if nvars == 1 else f'x{i + 1}'


def format_poly(f: MPoly) -> str:
    """Canonical text form, terms in graded lex descending order"""
    if f.is_zero():
        return '0'
    pieces = []
    for k, exp in enumerate(f.support()):
        c = f.terms[exp]
        factors = []
        for i, e in enumerate(exp):
            if e == 1:
                factors.append(_variable_name(i, f.nvars))
            elif e > 1:
                factors.append(f'{_variable_name(i, f.nvars)}^{e}')
        magnitude = abs(c)
        if not factors:
            body = format_rat(magnitude)
        elif magnitude == 1:
            body = '*'.join(factors)
        else:
            body = format_rat(magnitude) + '*' + '*'.join(factors)
        if k == 0:
            pieces.append(('-' if c < 0 else '') + body)
        else:
            pieces.append((' - ' if c < 0 else ' + ') + body)
    return ''.join(pieces)


class PolyParser:
    """Recursive-descent reader for the polynomial grammar"""

    NAT = re.compile(r'\d+')
    ALIASES = {'x': 1, 'y': 2, 'z': 3}

    def __init__(self, text: str, nvars: int):
        self.text = text
        self.nvars = nvars
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ''

    def _nat(self) -> Optional[int]:
        match = self.NAT.match(self.text, self.pos)
        if not match:
            return None
        self.pos = match.end()
        return int(match.group())

    def parse(self) -> MPoly:
        result = MPoly.zero(self.nvars)
        self._skip_ws()
        if not self._peek():
            raise ParseError("Empty polynomial", self.pos)
        sign = 1
        if self._peek() in '+-':
            sign = -1 if self._peek() == '-' else 1
            self.pos += 1
            self._skip_ws()
        result = result + self._term().scale(sign)
        while True:
            self._skip_ws()
            ch = self._peek()
            if not ch:
                return result
            if ch not in '+-':
                raise ParseError(f"Unexpected character '{ch}'", self.pos)
            self.pos += 1
            self._skip_ws()
            term = self._term()
            result = result + (term if ch == '+' else -term)

    def _term(self) -> MPoly:
        start = self.pos
        coef = Fraction(1)
        exp = [0] * self.nvars
        have_coef = False
        numerator = self._nat()
        if numerator is not None:
            have_coef = True
            coef = Fraction(numerator)
            if self._peek() == '/':
                self.pos += 1
                denominator = self._nat()
                if denominator is None:
                    raise ParseError("Expected denominator", self.pos)
                if denominator == 0:
                    raise ParseError("Zero denominator", self.pos)
                coef = Fraction(numerator, denominator)
        factors = 0
        while True:
            save = self.pos
            self._skip_ws()
            if self._peek() == '*':
                self.pos += 1
                self._skip_ws()
                if self._peek() not in self.ALIASES:
                    raise ParseError("Expected a variable after '*'", self.pos)
            elif self._peek() not in self.ALIASES:
                self.pos = save
                break
            index, power = self._factor()
            exp[index - 1] += power
            factors += 1
        if not have_coef and not factors:
            raise ParseError("Expected a term", start)
        if any(e > Config.MAX_DEGREE_PER_VARIABLE for e in exp):
            raise DegreeError(f"Exponent exceeds the per-variable bound {Config.MAX_DEGREE_PER_VARIABLE}")
        return MPoly(self.nvars, {tuple(exp): coef})

    def _factor(self) -> Tuple[int, int]:
        start = self.pos
        letter = self.text[self.pos]
        self.pos += 1
        index = self.ALIASES[letter]
        if letter == 'x':
            explicit = self._nat()
            if explicit is not None:
                index = explicit
        if not 1 <= index <= self.nvars:
            raise UnknownVariableError(f"Unknown variable '{self.text[start:self.pos]}' for {self.nvars} variables", start)
        power = 1
        self._skip_ws()
        if self._peek() == '^':
            self.pos += 1
            self._skip_ws()
            power = self._nat()
            if power is None:
                raise ParseError("Expected exponent", self.pos)
            if power > Config.MAX_DEGREE_PER_VARIABLE:
                raise DegreeError(f"Exponent {power} exceeds the per-variable bound {Config.MAX_DEGREE_PER_VARIABLE}")
        return index, power


def parse_poly(text: str, nvars: int) -> MPoly:
    return PolyParser(text, nvars).parse()


def parse_upoly(text: str) -> UPoly:
    return parse_poly(text, 1).to_upoly()
