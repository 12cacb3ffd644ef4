#!/usr/bin/env python3
"""
Exact quadratic-form algebra over the rationals.

Congruence diagonalization by square completion, rank and signature
(from the diagonal and, independently, from Descartes' rule on the
characteristic polynomial) and psd tests.
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import List, Sequence, Tuple, Union

from errors import CertificateError, DimensionError
from models import DiagCongruence, SosCert
from polynomials import MPoly
from rational_matrix import Mat, SymMat, charpoly, det

logger = logging.getLogger(__name__)


def as_symmetric(M) -> SymMat:
    if isinstance(M, SymMat):
        return M
    if isinstance(M, Mat):
        return SymMat.from_mat(M)
    return SymMat.from_rows(M)


def diagonalize(M) -> DiagCongruence:
    """
    Write M = P^T diag(D) P.

    A nonzero diagonal pivot is removed by completing the square. When the
    whole diagonal vanishes, the first nonzero pair (i, j) is split through
    h1*h2 = ((h1+h2)/2)^2 - ((h1-h2)/2)^2. Indices never touched get unit
    forms with weight 0 so that P stays invertible.
    """
    S = as_symmetric(M)
    n = S.dim
    a = S.to_rows()
    forms: List[List[Fraction]] = []
    weights: List[Fraction] = []
    eliminated = set()

    while True:
        pivot = next((i for i in range(n) if a[i][i] != 0), None)
        if pivot is not None:
            lam = a[pivot][pivot]
            form = [e / lam for e in a[pivot]]
            a = [[a[r][c] - lam * form[r] * form[c] for c in range(n)] for r in range(n)]
            forms.append(form)
            weights.append(lam)
            eliminated.add(pivot)
            continue
        pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i][j] != 0), None)
        if pair is None:
            break
        i, j = pair
        entry = a[i][j]
        u, w = list(a[i]), list(a[j])
        h1 = [e / entry for e in w]
        h2 = [e / entry for e in u]
        forms.append([x + y for x, y in zip(h1, h2)])
        weights.append(entry / 2)
        forms.append([x - y for x, y in zip(h1, h2)])
        weights.append(-entry / 2)
        a = [[a[r][c] - (w[r] * u[c] + u[r] * w[c]) / entry for c in range(n)] for r in range(n)]
        eliminated.update((i, j))

    for k in range(n):
        if k not in eliminated:
            forms.append([Fraction(int(c == k)) for c in range(n)])
            weights.append(Fraction(0))

    logger.debug(f"Diagonalized {n}x{n} form, D = {[str(w) for w in weights]}")
    P = Mat.from_rows(forms) if n else Mat(0, 0, ())
    return DiagCongruence(P, tuple(weights))


def congruence_residual(M, congruence: DiagCongruence) -> Mat:
    """P^T diag(D) P - M, zero for a correct decomposition"""
    S = as_symmetric(M)
    P = congruence.P
    D = Mat.from_rows([[congruence.D[r] if r == c else 0 for c in range(len(congruence.D))]
                       for r in range(len(congruence.D))]) if congruence.D else Mat(0, 0, ())
    return P.transpose() @ D @ P - S.to_mat()


def signature(M) -> int:
    return diagonalize(M).signature


def rank(M) -> int:
    return diagonalize(M).rank


def signature_via_descartes(M) -> int:
    """sigma(h) - sigma(h(-X)) for h = det(M - X*I); h is real-rooted"""
    S = as_symmetric(M)
    if S.dim == 0:
        return 0
    h = charpoly(S, 'minus')
    return h.sign_changes() - h.compose_neg().sign_changes()


def rank_via_charpoly(M) -> int:
    """dim minus the multiplicity of the root 0 of det(M + X*I)"""
    S = as_symmetric(M)
    h = charpoly(S, 'plus')
    zero_multiplicity = next(i for i, c in enumerate(h.coeffs) if c != 0)
    return S.dim - zero_multiplicity


def is_psd(M) -> bool:
    """All coefficients of det(M + X*I) are nonnegative"""
    S = as_symmetric(M)
    return all(c >= 0 for c in charpoly(S, 'plus').coeffs)


def is_psd_by_diagonal(M) -> bool:
    return all(d >= 0 for d in diagonalize(M).D)


def is_psd_by_minors(M) -> bool:
    S = as_symmetric(M)
    return all(det(S.principal_submatrix(subset).to_rows()) >= 0
               for k in range(1, S.dim + 1)
               for subset in combinations(range(S.dim), k))


def _vector_polys(v: Sequence) -> List[MPoly]:
    polys = []
    for item in v:
        polys.append(item if isinstance(item, MPoly) else MPoly.monomial(tuple(item)))
    return polys


def quadratic_form_value(M, v: Sequence) -> MPoly:
    """v^T M v for a vector of monomials (exponent tuples) or polynomials"""
    S = as_symmetric(M)
    polys = _vector_polys(v)
    if len(polys) != S.dim:
        raise DimensionError(f"Vector of length {len(polys)} for a {S.dim}x{S.dim} matrix")
    if not polys:
        raise DimensionError("Empty vector")
    total = MPoly.zero(polys[0].nvars)
    for i in range(S.dim):
        for j in range(i, S.dim):
            if S[i, j]:
                factor = S[i, j] if i == j else 2 * S[i, j]
                total = total + (polys[i] * polys[j]).scale(factor)
    return total


def weighted_square_decomposition(M, v: Sequence) -> SosCert:
    """Exact certificate sum lambda_k * l_k(v)^2 = v^T M v with every lambda_k >= 0"""
    S = as_symmetric(M)
    if not is_psd(S):
        raise CertificateError("Matrix is not positive semidefinite")
    polys = _vector_polys(v)
    if len(polys) != S.dim:
        raise DimensionError(f"Vector of length {len(polys)} for a {S.dim}x{S.dim} matrix")
    congruence = diagonalize(S)
    terms: List[Tuple[Fraction, MPoly]] = []
    for k, weight in enumerate(congruence.D):
        if weight == 0:
            continue
        form = congruence.P.row(k)
        p = MPoly.zero(polys[0].nvars)
        for coefficient, q in zip(form, polys):
            if coefficient:
                p = p + q.scale(coefficient)
        terms.append((weight, p))
    return SosCert(tuple(terms))
