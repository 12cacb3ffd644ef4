#!/usr/bin/env python3
"""
Truncated quadratic modules and degree-d Lasserre relaxations.

Builds the moment and localizing blocks over the monomial index, writes
them in SDPA sparse format, checks module-membership certificates exactly
and brackets the minimum of a polynomial on S(g) by bisection.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from config import Config
from errors import DegreeError, DimensionError, InputError, NoGramError, NumericFailure, ParseError
from models import (BisectionResult, GramBlock, LasserreRelaxation, LocalizingBlock, ModuleCert, SosCert,
                    VerificationResult)
from polynomials import MPoly, graded_monomials
from quadratic_forms import is_psd, weighted_square_decomposition
from rational_matrix import SymMat
from sos_gram import FOUND, ForcedNegative, NumericGram, reduced_family, search_blocks

logger = logging.getLogger(__name__)

# Bisection certification retries, each stepping further below lo
BACKOFF_ATTEMPTS = 5


def _active(g: MPoly, d: int) -> bool:
    """g contributes a block: nonzero and deg g <= d"""
    return not g.is_zero() and g.degree <= d


def _half_degree(g: MPoly, d: int) -> int:
    return (d - max(g.degree, 0)) // 2


def _check_nvars(gs: Sequence[MPoly], n: int):
    for g in gs:
        if g.nvars != n:
            raise DimensionError(f"Constraint in {g.nvars} variables, expected {n}")


def build_relaxation(gs: Sequence[MPoly], d: int, n: Optional[int] = None) -> LasserreRelaxation:
    """Moment block for g0 = 1 plus one localizing block per active g"""
    if d < 1:
        raise InputError(f"Relaxation degree must be at least 1, got {d}")
    if n is None:
        if not gs:
            raise InputError("Variable count is required without constraints")
        n = gs[0].nvars
    _check_nvars(gs, n)

    index = tuple(graded_monomials(n, d))
    position = {alpha: k for k, alpha in enumerate(index)}
    blocks = []
    for g in [MPoly.constant(1, n)] + list(gs):
        if not _active(g, d):
            logger.info(f"Ignoring constraint of degree {g.degree} at relaxation degree {d}")
            continue
        monomials = tuple(graded_monomials(n, _half_degree(g, d)))
        rows = []
        for beta in monomials:
            row = []
            for gamma in monomials:
                entry: Dict[int, Fraction] = {}
                for delta, c in g.terms.items():
                    k = position[tuple(a + b + e for a, b, e in zip(beta, gamma, delta))]
                    entry[k] = entry.get(k, Fraction(0)) + c
                row.append({k: c for k, c in entry.items() if c})
            rows.append(tuple(row))
        blocks.append(LocalizingBlock(g, monomials, tuple(rows)))

    relaxation = LasserreRelaxation(n, d, tuple(gs), index, tuple(blocks))
    logger.info(f"Relaxation of degree {d}: {relaxation.num_variables} variables, blocks {relaxation.block_sizes}")
    return relaxation


def moment_vector(x: Sequence, rel: LasserreRelaxation) -> List[Fraction]:
    """y_alpha = x^alpha over the relaxation index, y_0 = 1"""
    monomial_values = []
    for alpha in rel.index:
        value = Fraction(1)
        for xi, a in zip(x, alpha):
            value *= Fraction(xi) ** a
        monomial_values.append(value)
    return monomial_values


def evaluate_blocks(rel: LasserreRelaxation, y: Sequence) -> List[SymMat]:
    """Blocks at a moment vector y (y[0] is taken as 1)"""
    values = [Fraction(1)] + [Fraction(v) for v in y[1:]]
    out = []
    for block in rel.blocks:
        s = block.size
        out.append(SymMat(s, tuple(sum((c * values[k] for k, c in block.entries[i][j].items()), Fraction(0))
                                   for i in range(s) for j in range(i, s))))
    return out


def _sdpa_value(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    if q.denominator > Config.SDPA_MAX_DENOMINATOR:
        raise InputError(f"Rational {q} has a denominator above {Config.SDPA_MAX_DENOMINATOR}")
    return repr(float(q))


def emit_sdpa(rel: LasserreRelaxation, objective: MPoly) -> str:
    """
    SDPA sparse text for: minimize sum c_k y_k subject to
    sum_k y_k F_k - F_0 psd, where each block is C + sum_k y_k A_k,
    F_k = A_k and F_0 = -C. The constant term of the objective is dropped.
    """
    if objective.nvars != rel.n:
        raise DimensionError(f"Objective in {objective.nvars} variables, expected {rel.n}")
    if objective.degree > rel.d:
        raise DegreeError(f"Objective degree {objective.degree} exceeds relaxation degree {rel.d}")

    lines = [str(rel.num_variables), str(len(rel.blocks)),
             ' '.join(str(s) for s in rel.block_sizes),
             ' '.join(_sdpa_value(objective.coefficient(alpha)) for alpha in rel.index[1:])]
    entries = []
    for b, block in enumerate(rel.blocks, start=1):
        for i in range(block.size):
            for j in range(i, block.size):
                for k, c in block.entries[i][j].items():
                    entries.append((k, b, i + 1, j + 1, -c if k == 0 else c))
    for k, b, i, j, value in sorted(entries):
        lines.append(f"{k} {b} {i} {j} {_sdpa_value(value)}")
    return '\n'.join(lines) + '\n'


def parse_sdpa(text: str) -> Dict:
    """Read the structure of an SDPA sparse file"""
    lines = [line.strip() for line in text.splitlines()
             if line.strip() and not line.lstrip().startswith(('"', '*'))]
    if len(lines) < 4:
        raise ParseError("Truncated SDPA file", 0)
    try:
        m = int(lines[0].split()[0])
        nblocks = int(lines[1].split()[0])
        sizes = [int(s) for s in lines[2].replace(',', ' ').replace('{', ' ').replace('}', ' ').split()]
        objective = [float(v) for v in lines[3].split()]
        entries = []
        for line in lines[4:]:
            k, b, i, j, value = line.split()
            entries.append((int(k), int(b), int(i), int(j), float(value)))
    except ValueError as e:
        raise ParseError(f"Malformed SDPA file: {e}", 0)
    if len(sizes) != nblocks or len(objective) != m:
        raise ParseError("SDPA header counts disagree", 0)
    return {'m': m, 'nblocks': nblocks, 'block_sizes': sizes, 'objective': objective, 'entries': entries}


def verify_module_membership(f: MPoly, gs: Sequence[MPoly], d: int, cert: ModuleCert) -> VerificationResult:
    """Exact check of f = sum sigma_i g_i with the degree caps of M_d(g)"""
    multipliers = [MPoly.constant(1, f.nvars)] + list(gs)
    if len(cert.sigmas) != len(multipliers):
        return VerificationResult(False, 'multiplier-count')
    if any(g.nvars != f.nvars for g in gs):
        return VerificationResult(False, 'variable-mismatch')
    total = MPoly.zero(f.nvars)
    for sigma, g in zip(cert.sigmas, multipliers):
        if not sigma.terms:
            continue
        if not _active(g, d):
            return VerificationResult(False, 'inactive-multiplier')
        for weight, p in sigma.terms:
            if weight < 0:
                return VerificationResult(False, 'negative-weight')
            if p.nvars != f.nvars:
                return VerificationResult(False, 'variable-mismatch')
            if not p.is_zero() and 2 * p.degree + g.degree > d:
                return VerificationResult(False, 'degree-cap')
        total = total + sigma.expand(f.nvars) * g
    if total != f:
        return VerificationResult(False, 'expansion-mismatch')
    return VerificationResult(True)


def _module_blocks(gs: Sequence[MPoly], d: int, n: int) -> Tuple[List[GramBlock], List[Optional[int]]]:
    """Gram blocks for the active multipliers and, per multiplier, its block position"""
    blocks, positions = [], []
    for g in [MPoly.constant(1, n)] + list(gs):
        if _active(g, d):
            positions.append(len(blocks))
            blocks.append(GramBlock.over_monomials(g, graded_monomials(n, _half_degree(g, d))))
        else:
            positions.append(None)
    return blocks, positions


def find_module_certificate(f: MPoly, gs: Sequence[MPoly], d: int) -> Tuple[str, Optional[ModuleCert]]:
    """Search for f in M_d(g); returns (status, certificate)"""
    _check_nvars(gs, f.nvars)
    blocks, positions = _module_blocks(gs, d, f.nvars)
    status, family, grams = search_blocks(f, blocks)
    if status != FOUND:
        return status, None
    sigmas = []
    for position in positions:
        if position is None or not family.blocks[position].size:
            sigmas.append(SosCert())
            continue
        sigmas.append(weighted_square_decomposition(grams[position], family.blocks[position].vector))
    cert = ModuleCert(tuple(sigmas))
    check = verify_module_membership(f, gs, d, cert)
    if not check:
        raise NumericFailure(f"Module certificate failed exact verification: {check.reason}")
    return FOUND, cert


def _looks_feasible(f: MPoly, gs: Sequence[MPoly], d: int, lam: Fraction) -> bool:
    """Numeric test of f - lam in M_d(g)"""
    blocks, _ = _module_blocks(gs, d, f.nvars)
    try:
        family = reduced_family(f - lam, blocks)
    except (NoGramError, ForcedNegative):
        return False
    if family.unique:
        return all(is_psd(g) for g in family.G0 if g.dim)
    numeric = NumericGram(family)
    if numeric.strictly_feasible() is not None:
        return True
    _, _, _, converged = numeric.project(numeric.g0, 0.0, -Config.SOS_TOLERANCE * numeric.scale)
    return converged


def _initial_bracket(f: MPoly, gs: Sequence[MPoly], d: int) -> Tuple[Fraction, Fraction]:
    lo = Fraction(-1)
    for _ in range(Config.BISECT_MAX_DOUBLINGS):
        if _looks_feasible(f, gs, d, lo):
            break
        lo *= 2
    else:
        raise NumericFailure("No feasible lower end found for the bisection")
    step = Fraction(1)
    hi = lo + step
    for _ in range(Config.BISECT_MAX_DOUBLINGS):
        if not _looks_feasible(f, gs, d, hi):
            return lo, hi
        lo = hi
        step *= 2
        hi = lo + step
    raise NumericFailure("No infeasible upper end found for the bisection")


def lower_bound_bisect(f: MPoly, gs: Sequence[MPoly], d: int, iterations: int,
                       bracket: Optional[Tuple] = None) -> BisectionResult:
    """
    Bisection on lam for f - lam in M_d(g).

    Decisions inside the loop are numeric. The returned lo is certified
    exactly when a rational module certificate for f - lo is found, possibly
    after backing off below the numeric lo.
    """
    _check_nvars(gs, f.nvars)
    if bracket is None:
        lo, hi = _initial_bracket(f, gs, d)
    else:
        lo, hi = Fraction(bracket[0]), Fraction(bracket[1])
        if lo >= hi:
            raise InputError(f"Empty bracket [{lo}, {hi}]")
    logger.info(f"Bisection bracket [{lo}, {hi}]")

    for k in range(iterations):
        mid = (lo + hi) / 2
        if _looks_feasible(f, gs, d, mid):
            lo = mid
        else:
            hi = mid
        logger.debug(f"Bisection step {k + 1}: [{lo}, {hi}]")

    width = hi - lo
    candidate = lo
    for attempt in range(BACKOFF_ATTEMPTS):
        status, cert = find_module_certificate(f - candidate, gs, d)
        if status == FOUND:
            logger.info(f"Certified lower bound {candidate} after {attempt} backoffs")
            return BisectionResult(candidate, hi, True, cert, iterations)
        candidate = lo - width * 2 ** attempt
    logger.warning(f"Lower bound {lo} is numeric only")
    return BisectionResult(lo, hi, False, None, iterations)
