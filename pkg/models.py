"""
Result records for the real-algebra toolkit
Plain immutable records with to_dict() for JSON output
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from polynomials import MPoly, UPoly, format_poly
from rational_matrix import Mat, SymMat, format_rat


def _rows(matrix) -> List[List[str]]:
    return [[format_rat(e) for e in row] for row in matrix.to_rows()]


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of an exact check; never raised, always returned"""
    ok: bool
    reason: str = 'ok'

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {'ok': self.ok, 'reason': self.reason}


@dataclass(frozen=True)
class DiagCongruence:
    """M = P^T diag(D) P with P invertible; rows of P are linear forms"""
    P: Mat
    D: Tuple[Fraction, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.D if d != 0)

    @property
    def signature(self) -> int:
        return sum(1 for d in self.D if d > 0) - sum(1 for d in self.D if d < 0)

    def to_dict(self):
        return {
            'P': _rows(self.P),
            'D': [format_rat(d) for d in self.D],
            'rank': self.rank,
            'signature': self.signature
        }


@dataclass(frozen=True)
class HermiteData:
    f: UPoly
    g: UPoly
    H: SymMat
    traces: Tuple[Fraction, ...]

    def to_dict(self):
        return {
            'f': str(self.f),
            'g': str(self.g),
            'H': _rows(self.H),
            'traces': [format_rat(t) for t in self.traces]
        }


@dataclass(frozen=True)
class ConicResult:
    """
    Variant 'A': x = sum of coefficients[k] * E[basis[k]], all coefficients >= 0.
    Variant 'B': functional >= 0 on E, < 0 at x, vanishing on E[kernel].
    """
    variant: str
    basis: Tuple[int, ...] = ()
    coefficients: Tuple[Fraction, ...] = ()
    functional: Tuple[Fraction, ...] = ()
    kernel: Tuple[int, ...] = ()
    pivots: int = 0

    @property
    def is_member(self) -> bool:
        return self.variant == 'A'

    def to_dict(self):
        if self.variant == 'A':
            return {
                'variant': 'A',
                'basis': list(self.basis),
                'coefficients': [format_rat(c) for c in self.coefficients],
                'pivots': self.pivots
            }
        return {
            'variant': 'B',
            'functional': [format_rat(c) for c in self.functional],
            'kernel': list(self.kernel),
            'pivots': self.pivots
        }


@dataclass(frozen=True)
class LinearNnsResult:
    """
    kind 'certificate': f = coefficients[0] + sum coefficients[i] * ls[i-1].
    kind 'witness': all ls >= 0 and f < 0 at witness.
    kind 'empty': S is empty; coefficients give -1 = c0 + sum c_i ls_i.
    """
    kind: str
    coefficients: Tuple[Fraction, ...] = ()
    witness: Tuple[Fraction, ...] = ()

    def to_dict(self):
        result = {'kind': self.kind}
        if self.coefficients:
            result['coefficients'] = [format_rat(c) for c in self.coefficients]
        if self.witness:
            result['witness'] = [format_rat(c) for c in self.witness]
        return result


@dataclass(frozen=True)
class SosCert:
    """Weighted squares: target = sum of weight * poly^2"""
    terms: Tuple[Tuple[Fraction, MPoly], ...] = ()

    def expand(self, nvars: int) -> MPoly:
        total = MPoly.zero(nvars)
        for weight, p in self.terms:
            total = total + (p * p).scale(weight)
        return total

    @property
    def degree(self):
        return max((2 * p.degree for _, p in self.terms if not p.is_zero()), default=float('-inf'))

    def to_dict(self):
        return {'terms': [{'weight': format_rat(w), 'poly': format_poly(p)} for w, p in self.terms]}


@dataclass(frozen=True)
class GramBlock:
    """
    One psd block contributing multiplier * w^T G w, where w = transform * monomials.
    The transform starts as the identity and shrinks when monomials or
    kernel directions are removed.
    """
    multiplier: MPoly
    monomials: Tuple[Tuple[int, ...], ...]
    transform: Tuple[Tuple[Fraction, ...], ...]

    @classmethod
    def over_monomials(cls, multiplier: MPoly, monomials: Sequence[Tuple[int, ...]]) -> 'GramBlock':
        monomials = tuple(tuple(m) for m in monomials)
        identity = tuple(tuple(Fraction(int(i == j)) for j in range(len(monomials))) for i in range(len(monomials)))
        return cls(multiplier, monomials, identity)

    @property
    def size(self) -> int:
        return len(self.transform)

    @property
    def vector(self) -> Tuple[MPoly, ...]:
        polys = []
        for row in self.transform:
            p = MPoly.zero(self.multiplier.nvars)
            for c, m in zip(row, self.monomials):
                if c:
                    p = p + MPoly.monomial(m, c)
            polys.append(p)
        return tuple(polys)

    def lift(self, G: SymMat) -> SymMat:
        """T^T G T, the same form written over the monomials"""
        T = Mat.from_rows(self.transform) if self.transform else Mat(0, len(self.monomials), ())
        return SymMat.from_mat(T.transpose() @ G.to_mat() @ T) if self.transform else SymMat.zeros(len(self.monomials))


@dataclass(frozen=True)
class GramFamily:
    """
    Affine family of block Gram matrices matching a target exactly:
    target = sum_b multiplier_b * w_b^T (G0_b + sum_j t_j B_j,b) w_b for every t.
    """
    target: MPoly
    blocks: Tuple[GramBlock, ...]
    G0: Tuple[SymMat, ...]
    basis: Tuple[Tuple[SymMat, ...], ...]
    forced: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    @property
    def v(self) -> Tuple[Tuple[int, ...], ...]:
        return self.blocks[0].monomials if self.blocks else ()

    @property
    def unique(self) -> bool:
        return not self.basis

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def point(self, t: Sequence) -> Tuple[SymMat, ...]:
        """G0 + sum_j t_j B_j, block by block"""
        out = []
        for b, g0 in enumerate(self.G0):
            entries = list(g0.entries)
            for tj, direction in zip(t, self.basis):
                tj = Fraction(tj)
                if tj:
                    entries = [e + tj * d for e, d in zip(entries, direction[b].entries)]
            out.append(SymMat(g0.dim, tuple(entries)))
        return tuple(out)

    def to_dict(self):
        return {
            'target': format_poly(self.target),
            'monomials': [list(m) for m in self.v],
            'G0': [_rows(g) for g in self.G0],
            'basis': [[_rows(g) for g in direction] for direction in self.basis],
            'forced': {f'{b},{i}': format_rat(v) for (b, i), v in self.forced.items()}
        }


@dataclass(frozen=True)
class SosSearchResult:
    """status is 'found', 'certified-infeasible' or 'unknown'"""
    status: str
    gram: Optional[Tuple[SymMat, ...]] = None
    monomials: Tuple[Tuple[int, ...], ...] = ()
    certificate: Optional[SosCert] = None
    reason: str = ''

    @property
    def found(self) -> bool:
        return self.status == 'found'

    def to_dict(self):
        result = {'status': self.status}
        if self.gram is not None:
            result['monomials'] = [list(m) for m in self.monomials]
            result['gram'] = [_rows(g) for g in self.gram] if len(self.gram) > 1 else _rows(self.gram[0])
        if self.certificate is not None:
            result.update(self.certificate.to_dict())
        if self.reason:
            result['reason'] = self.reason
        return result


@dataclass(frozen=True)
class ModuleCert:
    """sigmas[0] multiplies g0 = 1, sigmas[i] multiplies gs[i-1]"""
    sigmas: Tuple[SosCert, ...]

    def to_dict(self):
        return {'sigmas': [s.to_dict()['terms'] for s in self.sigmas]}


@dataclass(frozen=True)
class LocalizingBlock:
    """Block for g: entry (i, j) maps variable index -> coefficient, index 0 is the constant y_0 = 1"""
    g: MPoly
    monomials: Tuple[Tuple[int, ...], ...]
    entries: Tuple[Tuple[Dict[int, Fraction], ...], ...]

    @property
    def size(self) -> int:
        return len(self.monomials)


@dataclass(frozen=True)
class LasserreRelaxation:
    n: int
    d: int
    gs: Tuple[MPoly, ...]
    index: Tuple[Tuple[int, ...], ...]
    blocks: Tuple[LocalizingBlock, ...]

    @property
    def num_variables(self) -> int:
        """Moment variables y_alpha for 0 < |alpha| <= d"""
        return len(self.index) - 1

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(b.size for b in self.blocks)

    def to_dict(self):
        return {
            'n': self.n,
            'd': self.d,
            'variables': self.num_variables,
            'block_sizes': list(self.block_sizes),
            'gs': [format_poly(b.g) for b in self.blocks]
        }


@dataclass(frozen=True)
class BisectionResult:
    lo: Fraction
    hi: Fraction
    certified: bool
    certificate: Optional[ModuleCert] = None
    iterations: int = 0

    def to_dict(self):
        result = {
            'lo': format_rat(self.lo),
            'hi': format_rat(self.hi),
            'certified': self.certified,
            'iterations': self.iterations
        }
        if self.certificate is not None:
            result['certificate'] = self.certificate.to_dict()
        return result
