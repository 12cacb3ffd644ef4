#!/usr/bin/env python3
"""
Sums of squares through Gram matrices.

Exact layer: the affine family of block Gram matrices matching a target,
forced-entry reductions, Newton polytope checks, exact verification and the
Cassels descent for univariate weighted sums of squares.

Numeric layer: alternating projections between the affine family and the
psd cone (numpy eigh), followed by rational rounding of the parameters and
an exact psd test. Nothing numeric is ever returned without exact checking.
"""

import json
import logging
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from conic_pivot import newton_halved_lattice, newton_vertices
from errors import InputError, NoGramError, NumericFailure
from models import GramBlock, GramFamily, SosCert, SosSearchResult, VerificationResult
from polynomials import MPoly, UPoly, format_poly, parse_poly
from quadratic_forms import is_psd, quadratic_form_value, weighted_square_decomposition
from rational_matrix import SymMat, nullspace, parse_rat, solve_linear

logger = logging.getLogger(__name__)

FOUND = 'found'
INFEASIBLE = 'certified-infeasible'
UNKNOWN = 'unknown'

FACIAL_REDUCTION_ROUNDS = 2
KERNEL_DENOMINATORS = (10, 100, 1000, 10000)
NUMERIC_STARTS = 4
# Coordinates tried when looking for rational zeros of a target
ZERO_SEARCH_VALUES = tuple(Fraction(k, 2) for k in range(-6, 7))


class ForcedNegative(Exception):
    """A diagonal Gram entry is forced to a negative value"""


def _slots(blocks: Sequence[GramBlock]) -> List[Tuple[int, int, int]]:
    return [(b, i, j) for b, block in enumerate(blocks) for i in range(block.size) for j in range(i, block.size)]


def block_family(target: MPoly, blocks: Sequence[GramBlock]) -> GramFamily:
    """
    Solve sum_b multiplier_b * w_b^T G_b w_b = target for the upper-triangle
    entries of every G_b. Raises NoGramError when the system is inconsistent.
    """
    blocks = tuple(blocks)
    slots = _slots(blocks)
    vectors = [block.vector for block in blocks]
    contributions = []
    for b, i, j in slots:
        p = blocks[b].multiplier * vectors[b][i] * vectors[b][j]
        contributions.append(p if i == j else p.scale(2))

    monomials = sorted(set(target.terms).union(*(p.terms for p in contributions)))
    A = [[p.coefficient(m) for p in contributions] for m in monomials]
    rhs = [target.coefficient(m) for m in monomials]

    if not slots:
        if not target.is_zero():
            raise NoGramError("No Gram entries left for a nonzero target")
        return GramFamily(target, blocks, tuple(SymMat.zeros(0) for _ in blocks), ())

    particular = solve_linear(A, rhs) if A else [Fraction(0)] * len(slots)
    if particular is None:
        raise NoGramError(f"Coefficient matching for {format_poly(target)} is inconsistent")
    directions = nullspace(A, ncols=len(slots)) if A else [
        [Fraction(int(k == s)) for k in range(len(slots))] for s in range(len(slots))]

    def split(values) -> Tuple[SymMat, ...]:
        out, start = [], 0
        for block in blocks:
            count = block.size * (block.size + 1) // 2
            out.append(SymMat(block.size, tuple(values[start:start + count])))
            start += count
        return tuple(out)

    forced = {}
    for k, (b, i, j) in enumerate(slots):
        if i == j and all(d[k] == 0 for d in directions):
            forced[(b, i)] = particular[k]

    logger.debug(f"Gram family: {len(slots)} entries, {len(directions)} free parameters, {len(forced)} forced diagonals")
    return GramFamily(target, blocks, split(particular), tuple(split(d) for d in directions), forced)


def _drop_rows(block: GramBlock, rows: Sequence[int]) -> GramBlock:
    keep = tuple(r for k, r in enumerate(block.transform) if k not in set(rows))
    return GramBlock(block.multiplier, block.monomials, keep)


def reduced_family(target: MPoly, blocks: Sequence[GramBlock]) -> GramFamily:
    """
    Family after removing every vector entry whose diagonal is forced to 0.
    A psd matrix with a zero diagonal entry has a zero row, so the removal is exact.
    """
    blocks = list(blocks)
    while True:
        family = block_family(target, blocks)
        negative = [key for key, value in family.forced.items() if value < 0]
        if negative:
            raise ForcedNegative(f"Diagonal entries {negative} forced negative")
        zero = [key for key, value in family.forced.items() if value == 0]
        if not zero:
            return family
        for b in {key[0] for key in zero}:
            blocks[b] = _drop_rows(blocks[b], [i for (bb, i) in zero if bb == b])
        logger.debug(f"Removed {len(zero)} forced-zero entries")


class NumericGram:
    """Floating-point view of a Gram family for alternating projections"""

    def __init__(self, family: GramFamily):
        self.family = family
        self.sizes = [g.dim for g in family.G0]
        self.g0 = self._flatten(family.G0)
        self.directions = np.array([self._flatten(d) for d in family.basis]).T
        self.pinv = np.linalg.pinv(self.directions)
        self.scale = max(1.0, float(np.max(np.abs(self.g0))) if self.g0.size else 1.0)

    @staticmethod
    def _flatten(mats: Sequence[SymMat]) -> np.ndarray:
        parts = [np.array([[float(e) for e in row] for row in m.to_rows()]).ravel() for m in mats if m.dim]
        return np.concatenate(parts) if parts else np.zeros(0)

    def _blocks(self, vec: np.ndarray) -> List[np.ndarray]:
        out, start = [], 0
        for s in self.sizes:
            if s:
                out.append(vec[start:start + s * s].reshape(s, s))
                start += s * s
        return out

    def affine(self, vec: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        t = self.pinv @ (vec - self.g0)
        return self.g0 + self.directions @ t, t

    def psd(self, vec: np.ndarray, margin: float) -> np.ndarray:
        parts = []
        for block in self._blocks(vec):
            w, V = np.linalg.eigh((block + block.T) / 2)
            parts.append(((V * np.maximum(w, margin)) @ V.T).ravel())
        return np.concatenate(parts) if parts else vec

    def min_eigenvalue(self, vec: np.ndarray) -> float:
        return min((float(np.linalg.eigvalsh((b + b.T) / 2)[0]) for b in self._blocks(vec)), default=0.0)

    def project(self, start: np.ndarray, margin: float, accept: float):
        """Alternate until the affine iterate has min eigenvalue >= accept"""
        y, t = self.affine(start)
        z = y
        for sweep in range(Config.SOS_MAX_SWEEPS):
            if self.min_eigenvalue(y) >= accept:
                logger.debug(f"Accepted after {sweep} sweeps (margin {margin})")
                return t, y, z, True
            z = self.psd(y, margin)
            y, t = self.affine(z)
            if np.linalg.norm(y - z) < Config.SOS_TOLERANCE * self.scale and margin == 0:
                return t, y, z, True
        return t, y, z, False

    def strictly_feasible(self) -> Optional[np.ndarray]:
        margin = Config.SOS_MARGIN * self.scale
        t, _, _, ok = self.project(self.g0, margin, margin / 2)
        return t if ok else None

    def starts(self) -> List[np.ndarray]:
        rng = np.random.default_rng(0)
        identity = np.concatenate([np.eye(s).ravel() for s in self.sizes if s]) if self.g0.size else self.g0
        out = [self.g0, self.g0 + self.scale * identity]
        for _ in range(NUMERIC_STARTS - 2):
            noise = np.concatenate([self._symmetric(rng, s).ravel() for s in self.sizes if s])
            out.append(self.g0 + self.scale * noise)
        return out

    @staticmethod
    def _symmetric(rng, s: int) -> np.ndarray:
        a = rng.standard_normal((s, s))
        return (a + a.T) / 2

    def boundary_point(self) -> Optional[List[np.ndarray]]:
        """Average of psd points reached from several starts, blockwise"""
        points = []
        for start in self.starts():
            _, y, z, ok = self.project(start, 0.0, -Config.SOS_TOLERANCE * self.scale)
            if ok or np.linalg.norm(y - z) < 1e-3 * self.scale:
                points.append(self.psd(y, 0.0))
        if not points:
            return None
        return self._blocks(np.mean(points, axis=0))


def rationalize(family: GramFamily, t: np.ndarray) -> Optional[Tuple[SymMat, ...]]:
    """Round parameters with denominators 10, 10^2, ...; return the first exactly psd point"""
    for k in range(1, Config.SOS_MAX_DENOMINATOR_EXPONENT + 1):
        rounded = [Fraction(float(x)).limit_denominator(10 ** k) for x in t]
        grams = family.point(rounded)
        if all(is_psd(g) for g in grams if g.dim):
            logger.info(f"Rationalized Gram point with denominators up to 10^{k}")
            return grams
    return None


def _float_rref(rows: np.ndarray, tolerance: float = 1e-6) -> np.ndarray:
    a = np.array(rows, dtype=float)
    r = 0
    for c in range(a.shape[1]):
        if r == a.shape[0]:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) < tolerance:
            continue
        a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        for i in range(a.shape[0]):
            if i != r:
                a[i] = a[i] - a[i, c] * a[r]
        r += 1
    return a[:r]


def _restricted(block: GramBlock, W: Sequence[Sequence[Fraction]]) -> GramBlock:
    """Block whose Gram matrices are those of block with every row of W in the kernel"""
    U = nullspace(W, ncols=block.size)
    transform = tuple(tuple(sum((u[k] * block.transform[k][m] for k in range(block.size)), Fraction(0))
                            for m in range(len(block.monomials))) for u in U)
    return GramBlock(block.multiplier, block.monomials, transform)


def rational_zeros(target: MPoly, multipliers: Sequence[MPoly]) -> List[Tuple[Fraction, ...]]:
    """Small-denominator grid points where target vanishes and no multiplier is negative"""
    n = target.nvars
    if len(ZERO_SEARCH_VALUES) ** n > Config.SOS_ZERO_SEARCH_POINTS:
        logger.debug(f"Zero search skipped for {n} variables")
        return []
    return [x for x in product(ZERO_SEARCH_VALUES, repeat=n)
            if target(x) == 0 and all(m(x) >= 0 for m in multipliers)]


def _vanishing_rows(block: GramBlock, x: Sequence[Fraction],
                    directions: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """w(x) and the derivatives of w at x along each direction"""
    vector = block.vector
    rows = [[p(x) for p in vector]]
    for d in directions:
        rows.append([sum((c * p.derivative(i)(x) for i, c in enumerate(d, start=1) if c), Fraction(0)) for p in vector])
    return rows


def _zero_reduced_blocks(target: MPoly, blocks: Sequence[GramBlock]) -> Optional[List[GramBlock]]:
    """
    Exact facial reduction from rational zeros of the target.

    At a zero x where no multiplier is negative, every block whose multiplier
    is positive has w(x)^T G w(x) = 0 and hence G w(x) = 0. When all
    multipliers are positive at x, each block form vanishes to second order,
    so G also kills the derivative of w along the Hessian kernel of the target.
    """
    n = target.nvars
    zeros = rational_zeros(target, [block.multiplier for block in blocks])
    rows = [[] for _ in blocks]
    for x in zeros:
        values = [block.multiplier(x) for block in blocks]
        directions = []
        if all(v > 0 for v in values):
            hessian = [[target.derivative(i).derivative(j)(x) for j in range(1, n + 1)] for i in range(1, n + 1)]
            directions = nullspace(hessian, ncols=n)
        for b, (block, value) in enumerate(zip(blocks, values)):
            if value > 0 and block.size:
                rows[b].extend(_vanishing_rows(block, x, directions))

    reduced, changed = [], False
    for block, W in zip(blocks, rows):
        if any(e != 0 for row in W for e in row):
            reduced.append(_restricted(block, W))
            changed = True
        else:
            reduced.append(block)
    if not changed:
        return None
    logger.warning(f"No strictly feasible Gram point, restricting to the face cut out by {len(zeros)} rational zeros")
    return reduced


def _kernel_reduced_blocks(blocks: Sequence[GramBlock], point: List[np.ndarray],
                           denominator: int) -> Optional[List[GramBlock]]:
    """Restrict every block to the rounded complement of the numeric kernel"""
    reduced, changed = [], False
    numeric = iter(point)
    for block in blocks:
        if not block.size:
            reduced.append(block)
            continue
        Z = next(numeric)
        w, V = np.linalg.eigh((Z + Z.T) / 2)
        cutoff = Config.SOS_KERNEL_TOLERANCE * max(1.0, float(np.max(np.abs(w))))
        kernel = V[:, w < cutoff].T
        if not kernel.shape[0]:
            reduced.append(block)
            continue
        W = [[Fraction(float(x)).limit_denominator(denominator) for x in row] for row in _float_rref(kernel)]
        reduced.append(_restricted(block, W))
        changed = True
    return reduced if changed else None


def search_blocks(target: MPoly, blocks: Sequence[GramBlock], exact: bool = True,
                  rounds: int = FACIAL_REDUCTION_ROUNDS) -> Tuple[str, Optional[GramFamily], Optional[Tuple[SymMat, ...]]]:
    """
    Find rational psd blocks with sum multiplier * w^T G w = target.

    Returns (status, family, grams). Infeasibility is claimed only when it
    follows from exact linear reasoning on exactly derived blocks.
    """
    negative_status = INFEASIBLE if exact else UNKNOWN
    try:
        family = reduced_family(target, blocks)
    except (NoGramError, ForcedNegative) as e:
        logger.info(f"Gram family infeasible: {e}")
        return negative_status, None, None

    if family.unique:
        grams = family.G0
        if all(is_psd(g) for g in grams if g.dim):
            return FOUND, family, grams
        return negative_status, family, None

    numeric = NumericGram(family)
    logger.info(f"Numeric phase: {family.dimension} parameters, blocks {numeric.sizes}")
    t = numeric.strictly_feasible()
    if t is not None:
        grams = rationalize(family, t)
        if grams is not None:
            return FOUND, family, grams

    zero_blocks = _zero_reduced_blocks(target, family.blocks)
    if zero_blocks is not None:
        return search_blocks(target, zero_blocks, exact=exact, rounds=rounds)

    if rounds == 0:
        return UNKNOWN, family, None
    point = numeric.boundary_point()
    if point is None:
        logger.info("No psd point found in the numeric phase")
        return UNKNOWN, family, None

    logger.warning("No strictly feasible Gram point, trying facial reduction")
    for denominator in KERNEL_DENOMINATORS:
        blocks_reduced = _kernel_reduced_blocks(family.blocks, point, denominator)
        if blocks_reduced is None:
            break
        status, reduced, grams = search_blocks(target, blocks_reduced, exact=False, rounds=rounds - 1)
        if status == FOUND:
            return status, reduced, grams
    return UNKNOWN, family, None


def gram_family(f: MPoly, v: Sequence[Sequence[int]]) -> GramFamily:
    """Affine family of symmetric G with v^T G v = f"""
    if not v:
        raise InputError("Empty monomial vector")
    v = [tuple(m) for m in v]
    sums = {tuple(a + b for a, b in zip(m1, m2)) for m1 in v for m2 in v}
    missing = [e for e in f.terms if e not in sums]
    if missing:
        raise NoGramError(f"Exponents {missing} are not sums of two vector monomials")
    return block_family(f, [GramBlock.over_monomials(MPoly.constant(1, f.nvars), v)])


def newton_obstruction(f: MPoly) -> Optional[str]:
    """Reason f cannot be a sum of squares, read off the Newton polytope"""
    if f.degree % 2:
        return 'odd-degree'
    for vertex in newton_vertices(f):
        if any(e % 2 for e in vertex):
            return f'odd-vertex {list(vertex)}'
        if f.coefficient(vertex) < 0:
            return f'negative-vertex-coefficient {list(vertex)}'
    return None


def find_gram(f: MPoly) -> SosSearchResult:
    """
    Search for a rational psd Gram matrix of f over the halved Newton lattice.

    'certified-infeasible' is only reported from exact consequences; numeric
    failure is 'unknown'.
    """
    if f.is_zero():
        raise InputError("find_gram needs a nonzero polynomial")
    reason = newton_obstruction(f)
    if reason:
        logger.info(f"Not a sum of squares: {reason}")
        return SosSearchResult(INFEASIBLE, reason=reason)

    v = tuple(newton_halved_lattice(f))
    block = GramBlock.over_monomials(MPoly.constant(1, f.nvars), v)
    status, family, grams = search_blocks(f, [block])
    if status != FOUND:
        return SosSearchResult(status, monomials=v, reason='forced-negative-or-inconsistent' if status == INFEASIBLE else 'numeric-phase')

    found_block = family.blocks[0]
    G = found_block.lift(grams[0])
    certificate = weighted_square_decomposition(grams[0], found_block.vector) if found_block.size else SosCert()
    if not verify_sos(f, (G, v)):
        raise NumericFailure("Rationalized Gram matrix failed exact verification")
    return SosSearchResult(FOUND, gram=(G,), monomials=v, certificate=certificate)


def verify_sos(f: MPoly, cert) -> VerificationResult:
    """Exact check of a weighted-square certificate or a (G, v) Gram pair"""
    if isinstance(cert, SosCert):
        if any(weight < 0 for weight, _ in cert.terms):
            return VerificationResult(False, 'negative-weight')
        if any(p.nvars != f.nvars for _, p in cert.terms):
            return VerificationResult(False, 'variable-mismatch')
        if cert.expand(f.nvars) != f:
            return VerificationResult(False, 'expansion-mismatch')
        return VerificationResult(True)
    G, v = cert
    if not isinstance(G, SymMat):
        try:
            G = SymMat.from_rows(G)
        except ValueError:
            return VerificationResult(False, 'not-symmetric')
    if G.dim != len(v):
        return VerificationResult(False, 'dimension-mismatch')
    if not is_psd(G):
        return VerificationResult(False, 'not-psd')
    if G.dim and quadratic_form_value(G, v) != f:
        return VerificationResult(False, 'gram-mismatch')
    if not G.dim and not f.is_zero():
        return VerificationResult(False, 'gram-mismatch')
    return VerificationResult(True)


def cassels_descent(weights: Sequence, fs: Sequence[UPoly], g: UPoly,
                    trace: Optional[List[int]] = None) -> SosCert:
    """
    Turn sum a_i (f_i/g)^2 = h with h a polynomial into sum a_i p_i^2 = h.

    Each step writes f_i = q_i g + r_i and replaces (f, g) by
    (s f - 2 t q, s g - 2 t) with s = <q,q> - h and t = <f,q> - g h,
    which strictly lowers deg g.
    """
    weights = [Fraction(w) for w in weights]
    if len(weights) != len(fs):
        raise InputError("One weight per polynomial is required")
    if any(w < 0 for w in weights):
        raise InputError("Weights must be nonnegative")
    if g.is_zero():
        raise InputError("Denominator must be nonzero")

    active = [k for k, w in enumerate(weights) if w > 0]
    a = [weights[k] for k in active]
    f = [fs[k] for k in active]

    def inner(u: Sequence[UPoly], w: Sequence[UPoly]) -> UPoly:
        total = UPoly()
        for weight, x, y in zip(a, u, w):
            total = total + x * y * weight
        return total

    h = inner(f, f).exact_div(g * g)
    if h is None:
        raise InputError("Weighted sum of squares is not divisible by g^2")

    steps = 0
    while g.degree > 0:
        divided = [divmod(fi, g) for fi in f]
        q = [d[0] for d in divided]
        if all(d[1].is_zero() for d in divided):
            f, g = q, UPoly.constant(1)
            break
        s = inner(q, q) - h
        t = inner(f, q) - g * h
        new_g = s * g - t * 2
        if not new_g.degree < g.degree:
            raise InputError(f"Descent did not lower the denominator degree ({g.degree} -> {new_g.degree})")
        f = [s * fi - qi * t * 2 for fi, qi in zip(f, q)]
        g = new_g
        steps += 1
        if trace is not None:
            trace.append(g.degree)
        logger.debug(f"Cassels step {steps}: deg g = {g.degree}")

    c = g.leading_coefficient
    ps = [fi * (1 / c) for fi in f]
    if inner(ps, ps) != h:
        raise InputError("Descent result does not reproduce h")

    full = [UPoly()] * len(fs)
    for k, p in zip(active, ps):
        full[k] = p
    return SosCert(tuple((weights[k], full[k].to_mpoly()) for k in range(len(fs))))


def certificate_to_json(cert, target: Optional[MPoly] = None) -> str:
    """Serialize an SosCert or a (G, v) Gram pair"""
    if isinstance(cert, SosCert):
        data = cert.to_dict()
    else:
        G, v = cert
        data = {'monomials': [list(m) for m in v],
                'gram': [[str(e) for e in row] for row in G.to_rows()]}
    if target is not None:
        data = {'target': format_poly(target), **data}
    return json.dumps(data, indent=2)


def certificate_from_json(text: str, nvars: int):
    """Parse certificate JSON; returns (target or None, SosCert or (G, v))"""
    data = json.loads(text)
    target = parse_poly(data['target'], nvars) if 'target' in data else None
    if 'terms' in data:
        terms = tuple((parse_rat(t['weight']), parse_poly(t['poly'], nvars)) for t in data['terms'])
        return target, SosCert(terms)
    if 'gram' in data and 'monomials' in data:
        G = SymMat.from_rows([[parse_rat(e) for e in row] for row in data['gram']])
        v = [tuple(m) for m in data['monomials']]
        return target, (G, v)
    raise InputError("Certificate JSON needs 'terms' or 'gram' with 'monomials'")
