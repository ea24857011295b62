"""
Exact verification of the covering-radius lower bound

    ∫_P Q_G(x) dx >= R² |P| / 3

for the Voronoi cell P of a lattice, step by step, and of its equality case: equality holds
exactly when P is a rectangular box.

The chain fixes a deep hole t and cuts P into the pieces Q(t, v) = P ∩ (P + t + v). Each piece is
centrally symmetric about (t + v)/2, every point of it is at least as far from that center as from
the shifted half lattice ½Λ + t/2, and the half-lattice distance integrates to a quarter of the
cell's second moment.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from more_itertools import first_true

from .common import logger, measure
from .exactnum import RatMat, RatVec, ZERO, add, dot, mat_vec, neg, scale, sub, vec, vsum
from .lattice import GramLattice, LatticePoint, closest_vectors, enumerate_in_ball, qform
from .polytope import (
    Box,
    BoxVerdict,
    MomentData,
    NotBox,
    NotCentrallySymmetric,
    Polytope,
    first_moment,
    intersect,
    is_centrally_symmetric,
    is_rectangular_box,
    moments,
    qform_g,
    scale_half,
    second_moment,
    translate,
    volume,
)
from .voronoi import DeepHole, DelaunayCell, check_deep_hole, deep_holes, delaunay_cell_at, verify_empty_sphere, voronoi_cell


class VerificationError(Exception):
    pass


class IncompletePieces(VerificationError):
    pass


class InternalInconsistency(VerificationError):
    pass


class WrongCardinality(VerificationError):
    pass


EQ = '='
GE = '>='


class EquationRecord(NamedTuple):
    eq: str
    lhs: Fraction
    rhs: Fraction
    relation: str
    passed: bool
    detail: str = ''

    @property
    def tight(self) -> bool:
        return self.lhs == self.rhs


def _record(eq: str, lhs: Fraction, rhs: Fraction, relation: str, *, extra: bool = True, detail: str = '') -> EquationRecord:
    ok = lhs == rhs if relation == EQ else lhs >= rhs
    rec = EquationRecord(eq=eq, lhs=lhs, rhs=rhs, relation=relation, passed=ok and extra, detail=detail)
    if not rec.passed:
        logger.error('%s failed: %s %s %s (%s)', eq, lhs, relation, rhs, detail)
    return rec


class TessellationPiece(NamedTuple):
    v: LatticePoint
    region: Polytope
    # (t + v)/2, the center of symmetry
    center: RatVec
    about_origin: MomentData
    about_center: MomentData


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str = ''


class Equality(NamedTuple):
    semi_axes_sq: Tuple[Fraction, ...]
    k: int
    delaunay_vertices: Tuple[LatticePoint, ...]
    checks: Tuple[Check, ...]


class Strict(NamedTuple):
    gap: Fraction
    first_failure: str
    checks: Tuple[Check, ...]


EqualityVerdict = Union[Equality, Strict]


class ProofReport(NamedTuple):
    name: str
    gram: RatMat
    deep_hole: RatVec
    r_sq: Fraction
    volume: Fraction
    second_moment: Fraction
    k: int
    records: Tuple[EquationRecord, ...]
    verdict: EqualityVerdict
    # seconds; left out of batch output
    elapsed: Optional[float] = None

    @property
    def n(self) -> int:
        return len(self.gram)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def gap(self) -> Fraction:
        return self.second_moment - self.r_sq * self.volume / 3

    @property
    def ratio(self) -> Fraction:
        '''(3∫)/(R²|P|), at least 1'''
        return 3 * self.second_moment / (self.r_sq * self.volume)


### pieces

def tessellation_pieces(lat: GramLattice, cell: Polytope, hole: DeepHole) -> List[TessellationPiece]:
    t = hole.t
    # a nonempty piece puts t + v within 2R of the origin; 3R leaves slack at the boundary
    candidates = enumerate_in_ball(lat, neg(t), 9 * hole.r_sq)
    res = []
    for v in candidates:
        c = scale(Fraction(1, 2), add(t, v))
        # a full-dimensional piece is symmetric about c, so c is interior to both cells
        if not cell.contains_interior(c):
            continue
        region = intersect(cell, translate(cell, add(t, v)))
        if region is None:
            continue
        res.append(TessellationPiece(
            v=v,
            region=region,
            center=c,
            about_origin=moments(region),
            about_center=moments(region, c),
        ))
    logger.debug('%d candidates -> %d pieces', len(candidates), len(res))
    return res


def verify_eq1(cell: Polytope, pieces: Sequence[TessellationPiece]) -> EquationRecord:
    vol = sum((p.about_origin.volume for p in pieces), ZERO)
    mom = sum((p.about_origin.second_moment for p in pieces), ZERO)
    total_vol = volume(cell)
    total_mom = second_moment(cell)
    if vol != total_vol or mom != total_mom:
        raise IncompletePieces(f'pieces cover volume {vol} and moment {mom}, the cell has {total_vol} and {total_mom}')
    return _record('Eq1', total_mom, mom, EQ, detail=f'k={len(pieces)}')


def _inner_g(gram: RatMat, x: RatVec, y: RatVec) -> Fraction:
    return dot(x, mat_vec(gram, y))


def verify_eq2(piece: TessellationPiece) -> EquationRecord:
    q = piece.region
    c = piece.center
    if not is_centrally_symmetric(q, c):
        raise NotCentrallySymmetric(f'piece at v={piece.v} is not symmetric about {c}')
    lhs = piece.about_origin.second_moment
    rhs = qform_g(q.gram, c) * piece.about_center.volume + piece.about_center.second_moment
    # ∫_Q ⟨c, x - c⟩_G dx
    cross = _inner_g(q.gram, c, first_moment(q, c))
    return _record('Eq2', lhs, rhs, EQ, extra=cross == 0, detail=f'v={_fmt_point(piece.v)} cross={cross}')


def verify_eq3_pointwise(lat: GramLattice, pieces: Sequence[TessellationPiece], hole: DeepHole) -> EquationRecord:
    '''
    Q_G(x - c_v) >= dist²(x, ½Λ + t/2) at every vertex of every piece.
    '''
    lhs = rhs = ZERO
    bad: List[RatVec] = []
    far_at: Dict[RatVec, Fraction] = {}
    npoints = 0
    for p in pieces:
        for x in p.region.vertices:
            near = qform(lat, sub(x, p.center))
            far = far_at.get(x)
            if far is None:
                far = far_at[x] = closest_vectors(lat, sub(scale(2, x), hole.t)).dist_sq / 4
            lhs += near
            rhs += far
            npoints += 1
            if near < far:
                bad.append(x)
    detail = f'{npoints} vertices' + ('' if not bad else f', violated at {_fmt_point(bad[0])}')
    return _record('Eq3pt', lhs, rhs, GE, extra=len(bad) == 0, detail=detail)


def half_lattice_distance_integral(
        lat: GramLattice,
        cell: Polytope,
        hole: DeepHole,
        region: Optional[Polytope] = None,
) -> Fraction:
    '''
    ∫_R dist²(x, ½Λ + t/2) dx for a region R inside the Voronoi cell (the cell itself by default).
    The Voronoi cell of ½Λ at p = (w + t)/2 is ½P + p; R is cut along these cells.
    '''
    reg = cell if region is None else region
    half = scale_half(cell)
    t = hole.t
    n = lat.n
    # R lies in the ball of radius ρ around a and ½P + p in the ball of radius R_Λ/2 around p,
    # so a cell meeting R has |w - (2a - t)| <= 2ρ + R_Λ
    a = scale(Fraction(1, len(reg.vertices)), vsum(reg.vertices, n))
    rho_sq = max(qform(lat, sub(x, a)) for x in reg.vertices)
    ball = enumerate_in_ball(lat, sub(scale(2, a), t), 8 * rho_sq + 2 * hole.r_sq)
    rvals = [[h.value(x) for x in reg.vertices] for h in cell.halfspaces]
    total = ZERO
    used = 0
    for w in ball:
        p = scale(Fraction(1, 2), add(w, t))
        # ½P + p spans ℓ·p ± b/2 along each facet normal ℓ of P
        if any(
            min(vals) >= h.value(p) + h.offset / 2 or max(vals) <= h.value(p) - h.offset / 2
            for h, vals in zip(cell.halfspaces, rvals)
        ):
            continue
        moved = translate(half, p)
        if all(reg.contains(x) for x in moved.vertices):
            piece: Optional[Polytope] = moved
        elif all(moved.contains(x) for x in reg.vertices):
            piece = reg
        else:
            piece = intersect(reg, moved)
        if piece is None:
            continue
        used += 1
        total += second_moment(piece, p)
    logger.debug('half-lattice integral over %s: %d of %d cells', reg, used, len(ball))
    return total


def verify_eq3_aggregate(
        lat: GramLattice,
        cell: Polytope,
        pieces: Sequence[TessellationPiece],
        hole: DeepHole,
) -> Tuple[EquationRecord, Fraction]:
    '''
    Σ ∫_Q Q_G(x - c_v) >= Σ ∫_Q dist²(x, ½Λ + t/2). Also returns the right hand side.
    '''
    lhs = sum((p.about_center.second_moment for p in pieces), ZERO)
    rhs = sum((half_lattice_distance_integral(lat, cell, hole, p.region) for p in pieces), ZERO)
    rec = _record('Eq3agg', lhs, rhs, GE, detail='equality' if lhs == rhs else f'gap={lhs - rhs}')
    return rec, rhs


def verify_eq5(lat: GramLattice, hole: DeepHole) -> EquationRecord:
    '''
    min over v ∈ Λ of Q_G((t + v)/2) equals Q_G(t)/4.
    '''
    lhs = closest_vectors(lat, neg(hole.t)).dist_sq / 4
    return _record('Eq5', lhs, qform(lat, hole.t) / 4, EQ)


def verify_eq4(
        lat: GramLattice,
        cell: Polytope,
        pieces: Sequence[TessellationPiece],
        hole: DeepHole,
        half_total: Fraction,
) -> EquationRecord:
    '''
    ∫_P Q_G >= inf_v Q_G((t+v)/2)·|P| + ∫_P dist²(x, ½Λ + t/2).
    The infimum is taken over all of Λ; the one over piece translates is reported alongside.
    '''
    inf_all = closest_vectors(lat, neg(hole.t)).dist_sq / 4
    inf_pieces = min(qform(lat, p.center) for p in pieces)
    lhs = second_moment(cell)
    rhs = inf_all * volume(cell) + half_total
    detail = f'inf_all={inf_all} inf_pieces={inf_pieces}'
    return _record('Eq4', lhs, rhs, GE, extra=inf_all <= inf_pieces, detail=detail)


def verify_fundamental_domain(cell: Polytope) -> EquationRecord:
    '''
    2ⁿ copies of ½P make up a fundamental domain: 2ⁿ|½P| = |P| and 2ⁿ∫_{½P} Q_G = ¼∫_P Q_G.
    '''
    half = scale_half(cell)
    k = 2 ** cell.n
    ok_vol = k * volume(half) == volume(cell)
    return _record('EqD', k * second_moment(half), second_moment(cell) / 4, EQ, extra=ok_vol, detail=f'volume ok={ok_vol}')


def verify_eq7(cell: Polytope, half_total: Fraction) -> EquationRecord:
    return _record('Eq7', half_total, second_moment(cell) / 4, EQ)


### equality case

class TripleCheck(NamedTuple):
    passed: bool
    # (v_i, v_j, v_l) with ⟨v_i - v_l, v_j - v_l⟩_G < 0
    witness: Optional[Tuple[RatVec, RatVec, RatVec]] = None


def check_nonobtuse(points: Sequence[Sequence], gram: RatMat) -> TripleCheck:
    pts = [vec(p) for p in points]
    for l, vl in enumerate(pts):
        others = [p for k, p in enumerate(pts) if k != l]
        diffs = [sub(p, vl) for p in others]
        gdiffs = [mat_vec(gram, d) for d in diffs]
        for i, j in combinations(range(len(others)), 2):
            if dot(diffs[i], gdiffs[j]) < 0:
                return TripleCheck(passed=False, witness=(others[i], others[j], vl))
    return TripleCheck(passed=True)


def check_box_vertexset(points: Sequence[Sequence], gram: RatMat) -> BoxVerdict:
    '''
    Whether the points are exactly the vertices of a G-rectangular box.
    Axes are read off the lexicographically least point: its neighbours in order of distance,
    each accepted if orthogonal to the axes taken so far.
    '''
    n = len(gram)
    pts = sorted(set(vec(p) for p in points))
    if len(pts) != len(points) or len(pts) != 2 ** n:
        raise WrongCardinality(f'{len(points)} points ({len(pts)} distinct), expected {2 ** n}')
    base = pts[0]
    edges = sorted((sub(p, base) for p in pts[1:]), key=lambda d: (qform_g(gram, d), d))
    axes: List[RatVec] = []
    for d in edges:
        if all(_inner_g(gram, d, a) == 0 for a in axes):
            axes.append(d)
        if len(axes) == n:
            break
    if len(axes) < n:
        return NotBox(f'only {len(axes)} orthogonal edges at {_fmt_point(base)}')
    corners = {add(base, vsum(sub_axes, n)) for k in range(n + 1) for sub_axes in combinations(axes, k)}
    missing = first_true(pts, pred=lambda p: p not in corners)
    if missing is not None:
        return NotBox(f'{_fmt_point(missing)} is not a corner of the box spanned at {_fmt_point(base)}')
    axes.sort(reverse=True)
    return Box(axes=tuple(axes), semi_axes_sq=tuple(qform_g(gram, a) / 4 for a in axes))


class _Chain(NamedTuple):
    lat: GramLattice
    cell: Polytope
    hole: DeepHole
    pieces: List[TessellationPiece]


def _prepare(lat: GramLattice, hole: Optional[DeepHole], cap: Optional[int]) -> _Chain:
    cell = voronoi_cell(lat, cap=cap)
    if hole is None:
        hole = deep_holes(lat, cell)[0]
    else:
        check_deep_hole(lat, hole)
    with measure('pieces', logger=logger):
        pieces = tessellation_pieces(lat, cell, hole)
    return _Chain(lat=lat, cell=cell, hole=hole, pieces=pieces)


def _checklist(chain: _Chain) -> Tuple[List[Check], DelaunayCell, BoxVerdict]:
    lat, cell, hole, pieces = chain
    n = lat.n
    half = scale_half(cell)
    checks: List[Check] = []

    bad_shape = first_true(pieces, pred=lambda p: p.region != translate(half, p.center))
    checks.append(Check('piece-shape', bad_shape is None, '' if bad_shape is None else f'v={_fmt_point(bad_shape.v)}'))

    k = len(pieces)
    checks.append(Check('piece-count', k == 2 ** n, f'k={k}'))

    parities = [tuple(x % 2 for x in p.v) for p in pieces]
    checks.append(Check('distinct-mod-2', len(set(parities)) == len(parities)))

    off = first_true(pieces, pred=lambda p: qform(lat, add(hole.t, p.v)) != hole.r_sq)
    checks.append(Check('eq10', off is None, '' if off is None else f'v={_fmt_point(off.v)}'))

    dcell = delaunay_cell_at(lat, hole)
    es = verify_empty_sphere(lat, dcell)
    if not es.passed:
        raise InternalInconsistency(f'Delaunay sphere around {dcell.center} contains {es.witness}')
    checks.append(Check('empty-sphere', True, f'{len(dcell.vertices)} vertices'))

    tc = check_nonobtuse(dcell.vertices, lat.gram)
    if not tc.passed:
        raise InternalInconsistency(f'obtuse triangle in a Delaunay cell: {tc.witness}')
    checks.append(Check('nonobtuse', True))

    if len(dcell.vertices) == 2 ** n:
        dbox = check_box_vertexset(dcell.vertices, lat.gram)
    else:
        dbox = NotBox(f'{len(dcell.vertices)} vertices')
    checks.append(Check('delaunay-box', isinstance(dbox, Box), getattr(dbox, 'reason', '')))

    pbox = is_rectangular_box(cell)
    checks.append(Check('voronoi-box', isinstance(pbox, Box), getattr(pbox, 'reason', '')))
    return checks, dcell, pbox


def _classify(chain: _Chain) -> EqualityVerdict:
    cell = chain.cell
    gap = second_moment(cell) - chain.hole.r_sq * volume(cell) / 3
    checks, dcell, pbox = _checklist(chain)
    failed = first_true(checks, pred=lambda c: not c.passed)
    if (failed is None) != (gap == 0):
        raise InternalInconsistency(f'gap is {gap} but the equality checklist says {checks}')
    if failed is None:
        assert isinstance(pbox, Box)
        return Equality(
            semi_axes_sq=pbox.semi_axes_sq,
            k=len(chain.pieces),
            delaunay_vertices=tuple(dcell.vertices),
            checks=tuple(checks),
        )
    return Strict(gap=gap, first_failure=failed.name, checks=tuple(checks))


def classify_equality(lat: GramLattice, hole: Optional[DeepHole] = None, *, cap: Optional[int] = None) -> EqualityVerdict:
    return _classify(_prepare(lat, hole, cap))


def verify_main(
        lat: GramLattice,
        *,
        name: str = '',
        hole: Optional[DeepHole] = None,
        cap: Optional[int] = None,
) -> ProofReport:
    with measure(f'verify {name}', logger=logger, unit='s') as elapsed:
        chain = _prepare(lat, hole, cap)
        cell, pieces = chain.cell, chain.pieces
        records: List[EquationRecord] = []
        records.append(verify_eq1(cell, pieces))
        records.extend(verify_eq2(p) for p in pieces)
        records.append(verify_eq3_pointwise(lat, pieces, chain.hole))
        # the pieces partition P, so their half-lattice integrals add up to the one over P
        eq3, half_total = verify_eq3_aggregate(lat, cell, pieces, chain.hole)
        records.append(eq3)
        records.append(verify_eq4(lat, cell, pieces, chain.hole, half_total))
        records.append(verify_eq5(lat, chain.hole))
        records.append(verify_fundamental_domain(cell))
        records.append(verify_eq7(cell, half_total))
        mom = second_moment(cell)
        vol = volume(cell)
        records.append(_record('Main', 3 * mom, chain.hole.r_sq * vol, GE))
        verdict = _classify(chain)
        secs = elapsed()
    report = ProofReport(
        name=name,
        gram=lat.gram,
        deep_hole=chain.hole.t,
        r_sq=chain.hole.r_sq,
        volume=vol,
        second_moment=mom,
        k=len(pieces),
        records=tuple(records),
        verdict=verdict,
        elapsed=secs,
    )
    logger.info('%s: %s, %d records, %s', name or lat.gram, 'pass' if report.passed else 'FAIL', len(records), type(verdict).__name__)
    return report


def verify_all_deep_holes(lat: GramLattice, *, cap: Optional[int] = None) -> List[Tuple[DeepHole, EqualityVerdict]]:
    '''
    Runs the equality classification from every deep hole; the verdict must not depend on the choice.
    '''
    cell = voronoi_cell(lat, cap=cap)
    res = [(h, classify_equality(lat, h, cap=cap)) for h in deep_holes(lat, cell)]
    kinds = {type(v).__name__ for _, v in res}
    if len(kinds) > 1:
        raise InternalInconsistency(f'verdict depends on the deep hole: {res}')
    return res


def _fmt_point(p: Iterable) -> str:
    return '(' + ','.join(str(x) for x in p) + ')'
