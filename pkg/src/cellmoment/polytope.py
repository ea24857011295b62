"""
Exact convex polytopes in lattice coordinates, measured with a Gram metric.

A polytope carries an irredundant H-representation, its full vertex list and the
vertex/facet incidence. Volumes and second moments are in coordinate measure: the
physical values are these times sqrt(det G), a factor that cancels in every identity
the verifier checks.

Canonical form: vertices are sorted lexicographically, each halfspace functional is
scaled by a positive factor so that its first nonzero entry is ±1, and halfspaces are
sorted. Two polytopes are equal iff they are the same set.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from math import comb, factorial, lcm
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from more_itertools import unique_everseen

from .common import logger
from .exactnum import (
    ZERO,
    RatMat,
    RatVec,
    add,
    affine_rank,
    det,
    dot,
    format_rat,
    int_det,
    inverse,
    mat,
    mat_vec,
    neg,
    parse_rat,
    rank,
    scale,
    simplex_volume,
    solve,
    sub,
    vec,
    vsum,
    zeros,
)


class PolytopeError(Exception):
    pass


class Unbounded(PolytopeError):
    pass


class LowerDimensional(PolytopeError):
    pass


class EmptyPolytope(LowerDimensional):
    pass


class DimensionCapExceeded(PolytopeError):
    pass


class NotCentrallySymmetric(PolytopeError):
    pass


class HalfSpace(NamedTuple):
    '''{x : functional·x <= offset}'''
    functional: RatVec
    offset: Fraction

    def value(self, x: Sequence[Fraction | int]) -> Fraction:
        return dot(self.functional, x)

    def contains(self, x: Sequence[Fraction | int]) -> bool:
        return self.value(x) <= self.offset


def halfspace(functional: Iterable, offset: Any) -> HalfSpace:
    l = vec(functional)
    b = parse_rat(offset)
    nz = next((x for x in l if x != 0), None)
    if nz is None:
        raise PolytopeError(f'zero functional (offset {format_rat(b)})')
    k = abs(nz)
    return HalfSpace(functional=tuple(x / k for x in l), offset=b / k)


Simplex = Tuple[RatVec, ...]


class MomentData(NamedTuple):
    volume: Fraction
    # ∫ Q_G(x - center) dx
    second_moment: Fraction
    center: RatVec


class Integrals(NamedTuple):
    '''
    ∫ 1, ∫ x and ∫ Q_G(x) over a polytope. Enough to get the second moment about any point.
    '''
    volume: Fraction
    first: RatVec
    second: Fraction

    def translated(self, s: RatVec, gram: RatMat) -> Integrals:
        # ∫_{P+s} Q(y) dy = ∫_P Q(x) + 2<s, x>_G + Q(s) dx
        gs = mat_vec(gram, s)
        return Integrals(
            volume=self.volume,
            first=add(self.first, scale(self.volume, s)),
            second=self.second + 2 * dot(gs, self.first) + dot(gs, s) * self.volume,
        )

    def scaled(self, k: Fraction, n: int) -> Integrals:
        kn = k ** n
        return Integrals(volume=self.volume * kn, first=scale(kn * k, self.first), second=self.second * kn * k * k)

    def about(self, c: RatVec, gram: RatMat) -> Fraction:
        '''∫ Q_G(x - c) dx'''
        gc = mat_vec(gram, c)
        return self.second - 2 * dot(gc, self.first) + dot(gc, c) * self.volume


@dataclass(frozen=True)
class Polytope:
    n: int
    halfspaces: Tuple[HalfSpace, ...]
    vertices: Tuple[RatVec, ...]
    # incidence[j] is the set of vertex indices lying on halfspaces[j]
    incidence: Tuple[FrozenSet[int], ...]
    gram: RatMat

    @cached_property
    def simplices(self) -> Tuple[Simplex, ...]:
        return tuple(_triangulate(self))

    @cached_property
    def integrals(self) -> Integrals:
        # moments are translation covariant, so translates share one exact integration
        base = self.vertices[0]
        return _integrate(translate(self, neg(base))).translated(base, self.gram)

    @cached_property
    def vertex_facets(self) -> Tuple[FrozenSet[int], ...]:
        res: List[set] = [set() for _ in self.vertices]
        for j, inc in enumerate(self.incidence):
            for i in inc:
                res[i].add(j)
        return tuple(frozenset(s) for s in res)

    def contains(self, x: Sequence[Fraction | int]) -> bool:
        return all(h.contains(x) for h in self.halfspaces)

    def contains_interior(self, x: Sequence[Fraction | int]) -> bool:
        return all(h.value(x) < h.offset for h in self.halfspaces)

    def __repr__(self) -> str:
        return f'Polytope(n={self.n}, facets={len(self.halfspaces)}, vertices={len(self.vertices)})'


def qform_g(gram: RatMat, x: Sequence[Fraction | int]) -> Fraction:
    n = len(gram)
    return Fraction(sum((x[i] * gram[i][j] * x[j] for i in range(n) for j in range(n) if x[i] and x[j]), ZERO))


def _assemble(n: int, gram: RatMat, candidates: Iterable[HalfSpace], vertices: Iterable[RatVec]) -> Polytope:
    '''
    Builds the canonical polytope from a complete vertex list and a (possibly redundant) set of
    halfspaces containing all the facets.
    '''
    verts = tuple(sorted(set(vertices)))
    if len(verts) == 0:
        raise EmptyPolytope('no vertices')
    if affine_rank(verts) < n:
        raise LowerDimensional(f'vertices span a {affine_rank(verts)}-dimensional affine subspace')

    facets: List[Tuple[HalfSpace, FrozenSet[int]]] = []
    for h in unique_everseen(candidates):
        vals = [h.value(v) for v in verts]
        assert all(x <= h.offset for x in vals), (h, verts)
        tight = frozenset(i for i, x in enumerate(vals) if x == h.offset)
        if len(tight) < n:
            continue
        if affine_rank([verts[i] for i in sorted(tight)]) != n - 1:
            continue
        facets.append((h, tight))
    facets.sort(key=lambda f: f[0])
    return Polytope(
        n=n,
        halfspaces=tuple(h for h, _ in facets),
        vertices=verts,
        incidence=tuple(inc for _, inc in facets),
        gram=gram,
    )


### double description

class _Ray(NamedTuple):
    # homogenized point (x, s); s > 0 is the vertex x/s, s == 0 a recession direction
    z: RatVec
    tight: FrozenSet[int]


def _normalize(z: RatVec) -> RatVec:
    s = z[-1]
    k = s if s != 0 else abs(next(x for x in z if x != 0))
    return tuple(x / k for x in z)


def _homogenize(h: HalfSpace) -> RatVec:
    # l·x <= b  <=>  l·x - b·s <= 0
    return h.functional + (-h.offset,)


def _clip(rays: List[_Ray], rows: Iterable[Tuple[int, RatVec]], d: int) -> List[_Ray]:
    '''
    Adds constraints a·z <= 0 one at a time. The rays must be exactly the extreme rays of a pointed
    cone, with tight sets taken over the constraints defining it; adjacency is decided combinatorially.
    '''
    for k, a in rows:
        vals = [dot(a, r.z) for r in rays]
        plus = [i for i, v in enumerate(vals) if v > 0]
        if len(plus) == 0:
            rays = [r._replace(tight=r.tight | {k}) if v == 0 else r for r, v in zip(rays, vals)]
            continue
        minus = [i for i, v in enumerate(vals) if v < 0]
        new: List[_Ray] = []
        for i in plus:
            ri = rays[i]
            for j in minus:
                rj = rays[j]
                common = ri.tight & rj.tight
                if len(common) < d - 2:
                    continue
                if any(common <= r.tight for h, r in enumerate(rays) if h != i and h != j):
                    continue
                z = tuple(vals[i] * y - vals[j] * x for x, y in zip(ri.z, rj.z))
                new.append(_Ray(_normalize(z), common | {k}))
        rays = [
            *(rays[j] for j in minus),
            *(r._replace(tight=r.tight | {k}) for r, v in zip(rays, vals) if v == 0),
            *new,
        ]
        if len(rays) == 0:
            break
    return rays


def _vertices_from_rays(rays: Sequence[_Ray]) -> List[RatVec]:
    if any(r.z[-1] == 0 for r in rays):
        raise Unbounded('unbounded direction in the halfspace intersection')
    if len(rays) == 0:
        raise EmptyPolytope('halfspaces have empty intersection')
    return [r.z[:-1] for r in rays]


def vertices_by_double_description(hs: Sequence[HalfSpace], n: int) -> List[RatVec]:
    d = n + 1
    rows: List[RatVec] = [(ZERO,) * n + (Fraction(-1),)]  # s >= 0
    rows.extend(_homogenize(h) for h in hs)

    chosen: List[int] = []
    for i, row in enumerate(rows):
        if rank([rows[j] for j in chosen] + [row]) > len(chosen):
            chosen.append(i)
        if len(chosen) == d:
            break
    if len(chosen) < d:
        raise Unbounded('halfspace normals do not span the space')

    # the simplicial cone A_K z <= 0 has extreme rays -A_K⁻¹ e_j, tight everywhere except row j
    inv = inverse(tuple(rows[i] for i in chosen))
    rays = [
        _Ray(_normalize(tuple(-inv[r][jj] for r in range(d))), frozenset(chosen) - {j})
        for jj, j in enumerate(chosen)
    ]
    cset = set(chosen)
    rest = [(i, row) for i, row in enumerate(rows) if i not in cset]
    return _vertices_from_rays(_clip(rays, rest, d))


def _kernel_vector(rows: Sequence[RatVec], n: int) -> RatVec:
    # generalized cross product of n-1 rows
    return tuple(
        (-1) ** j * det(tuple(r[:j] + r[j + 1:] for r in rows))
        for j in range(n)
    )


def _is_bounded(hs: Sequence[HalfSpace], n: int) -> bool:
    funcs = [h.functional for h in hs]
    if rank(funcs) < n:
        return False
    # a nontrivial recession cone has an extreme ray tight on n-1 independent constraints
    for combo in combinations(funcs, n - 1):
        y = _kernel_vector(combo, n)
        if all(x == 0 for x in y):
            continue
        for yy in (y, neg(y)):
            if all(dot(f, yy) <= 0 for f in funcs):
                return False
    return True


def vertices_by_pivoting(hs: Sequence[HalfSpace], n: int) -> List[RatVec]:
    '''
    Brute force: solve every n-subset of the boundary hyperplanes and keep the feasible solutions.
    Doesn't detect unboundedness by itself.
    '''
    res = set()
    for combo in combinations(hs, n):
        a = tuple(h.functional for h in combo)
        if det(a) == 0:
            continue
        x = solve(a, [h.offset for h in combo])
        if all(h.contains(x) for h in hs):
            res.add(x)
    return sorted(res)


# pivoting is only worth it while the number of n-subsets stays small
PIVOT_MAX_DIM = 3
PIVOT_MAX_SUBSETS = 2000

Method = str  # 'auto' | 'pivot' | 'dd'


def from_halfspaces(
        hs: Sequence[HalfSpace],
        gram: Sequence[Sequence],
        *,
        cap: Optional[int] = None,
        method: Method = 'auto',
) -> Polytope:
    from .config import dimension_cap

    g = mat(gram)
    n = len(g)
    if len(hs) == 0:
        raise Unbounded('no halfspaces')
    if any(len(h.functional) != n for h in hs):
        raise PolytopeError(f'halfspace dimension does not match the {n}x{n} metric')
    limit = dimension_cap(cap)
    if n > limit:
        raise DimensionCapExceeded(f'dimension {n} is above the cap {limit}')
    hs = [halfspace(h.functional, h.offset) for h in hs]

    if method == 'auto':
        small = n <= PIVOT_MAX_DIM and comb(len(hs), n) <= PIVOT_MAX_SUBSETS
        method = 'pivot' if small else 'dd'
    if method == 'pivot':
        if not _is_bounded(hs, n):
            raise Unbounded('halfspace intersection has a recession direction')
        verts = vertices_by_pivoting(hs, n)
        if len(verts) == 0:
            raise EmptyPolytope('halfspaces have empty intersection')
    elif method == 'dd':
        verts = vertices_by_double_description(hs, n)
    else:
        raise ValueError(f'unknown vertex enumeration method {method!r}')
    logger.debug('%s: %d halfspaces -> %d vertices', method, len(hs), len(verts))
    return _assemble(n, g, hs, verts)


def coordinate_box(half_widths: Iterable, gram: Sequence[Sequence], center: Optional[Iterable] = None) -> Polytope:
    '''
    The box ∏ [c_i - a_i, c_i + a_i] in lattice coordinates.
    '''
    a = vec(half_widths)
    n = len(a)
    c = zeros(n) if center is None else vec(center)
    hs = []
    for i in range(n):
        e = tuple(Fraction(1) if j == i else ZERO for j in range(n))
        hs.append(halfspace(e, c[i] + a[i]))
        hs.append(halfspace(neg(e), a[i] - c[i]))
    return from_halfspaces(hs, gram)


def from_points(points: Iterable[Iterable], gram: Sequence[Sequence]) -> Polytope:
    '''
    Only for simplices: the facet through all vertices but one.
    '''
    pts = [vec(p) for p in points]
    n = len(pts[0])
    if len(pts) != n + 1 or affine_rank(pts) != n:
        raise LowerDimensional(f'{len(pts)} points do not form an {n}-simplex')
    hs = []
    for k, opposite in enumerate(pts):
        face = pts[:k] + pts[k + 1:]
        base = face[0]
        normal = _kernel_vector([sub(p, base) for p in face[1:]], n)
        b = dot(normal, base)
        if dot(normal, opposite) > b:
            normal, b = neg(normal), -b
        hs.append(halfspace(normal, b))
    return _assemble(n, mat(gram), hs, pts)


def _same_space(p: Polytope, q: Polytope) -> None:
    if p.n != q.n or p.gram != q.gram:
        raise PolytopeError('polytopes live in different spaces')


def intersect(p: Polytope, q: Polytope) -> Optional[Polytope]:
    '''
    Exact P ∩ Q, or None when the intersection has no interior.
    Restarts the double description from P's vertices and clips by Q's halfspaces.
    '''
    _same_space(p, q)
    n = p.n
    rays = [_Ray(v + (Fraction(1),), tight) for v, tight in zip(p.vertices, p.vertex_facets)]
    m = len(p.halfspaces)
    rows = [(m + i, _homogenize(h)) for i, h in enumerate(q.halfspaces)]
    clipped = _clip(rays, rows, n + 1)
    if len(clipped) == 0:
        return None
    try:
        return _assemble(n, p.gram, p.halfspaces + q.halfspaces, _vertices_from_rays(clipped))
    except LowerDimensional:
        return None


def _carry(p: Polytope, q: Polytope, f: Callable[[Integrals], Integrals]) -> Polytope:
    # q is an affine image of p: reuse p's integrals when they were already computed
    known = p.__dict__.get('integrals')
    if known is not None:
        q.__dict__['integrals'] = f(known)
    return q


def translate(p: Polytope, s: Iterable) -> Polytope:
    sv = vec(s)
    # order of vertices and of normalized halfspaces is translation invariant
    q = Polytope(
        n=p.n,
        halfspaces=tuple(HalfSpace(h.functional, h.offset + h.value(sv)) for h in p.halfspaces),
        vertices=tuple(add(v, sv) for v in p.vertices),
        incidence=p.incidence,
        gram=p.gram,
    )
    return _carry(p, q, lambda i: i.translated(sv, p.gram))


def scale_polytope(p: Polytope, k: Any) -> Polytope:
    kk = parse_rat(k)
    if kk <= 0:
        raise PolytopeError(f'only positive homotheties are supported, got {format_rat(kk)}')
    q = Polytope(
        n=p.n,
        halfspaces=tuple(HalfSpace(h.functional, h.offset * kk) for h in p.halfspaces),
        vertices=tuple(scale(kk, v) for v in p.vertices),
        incidence=p.incidence,
        gram=p.gram,
    )
    return _carry(p, q, lambda i: i.scaled(kk, p.n))


def scale_half(p: Polytope) -> Polytope:
    return scale_polytope(p, Fraction(1, 2))


def reflect(p: Polytope, c: Optional[Iterable] = None) -> Polytope:
    '''Image under x ↦ 2c - x.'''
    cc = zeros(p.n) if c is None else vec(c)
    twice = scale(2, cc)
    hs = [halfspace(neg(h.functional), h.offset - h.value(twice)) for h in p.halfspaces]
    return _assemble(p.n, p.gram, hs, [sub(twice, v) for v in p.vertices])


def is_centrally_symmetric(p: Polytope, c: Optional[Iterable] = None) -> bool:
    cc = zeros(p.n) if c is None else vec(c)
    twice = scale(2, cc)
    vs = set(p.vertices)
    return all(sub(twice, v) in vs for v in p.vertices)


### triangulation and moments

def _triangulate(p: Polytope) -> List[Simplex]:
    '''
    Central fan: a face that is a simplex is returned as is, otherwise it is coned from the
    centroid of its vertices over the triangulations of its facets.
    '''
    verts = p.vertices
    memo: Dict[FrozenSet[int], List[Simplex]] = {}

    def subfacets(face: FrozenSet[int], k: int) -> List[FrozenSet[int]]:
        # faces of a face are its traces on the facets of p; the inclusion-maximal proper ones are its facets
        traces: List[FrozenSet[int]] = []
        for inc in p.incidence:
            g = face & inc
            if g != face and len(g) >= k and g not in traces:
                traces.append(g)
        return [g for g in traces if not any(g < h for h in traces)]

    def tri(face: FrozenSet[int], k: int) -> List[Simplex]:
        cached = memo.get(face)
        if cached is not None:
            return cached
        idx = sorted(face)
        if len(idx) == k + 1:
            res = [tuple(verts[i] for i in idx)]
        else:
            apex = scale(Fraction(1, len(idx)), vsum((verts[i] for i in idx), p.n))
            res = [s + (apex,) for g in subfacets(face, k) for s in tri(g, k - 1)]
        memo[face] = res
        return res

    return tri(frozenset(range(len(verts))), p.n)


def triangulate(p: Polytope) -> List[Simplex]:
    return list(p.simplices)


def simplex_second_moment(simplex: Simplex, gram: RatMat, c: RatVec) -> Fraction:
    '''
    ∫_S Q(x - c) dx = vol(S) / ((n+1)(n+2)) · (Σ_k Q(v_k - c) + Q(Σ_k (v_k - c)))
    '''
    n = len(c)
    shifted = [sub(v, c) for v in simplex]
    gv = [mat_vec(gram, v) for v in shifted]
    tot = vsum(shifted, n)
    total = sum((dot(v, w) for v, w in zip(shifted, gv)), ZERO) + dot(tot, vsum(gv, n))
    return simplex_volume(simplex) * total / ((n + 1) * (n + 2))


def _common_denominator(xs: Iterable[Fraction]) -> int:
    return lcm(1, *(x.denominator for x in xs))


@lru_cache(maxsize=4096)
def _integrate(p: Polytope) -> Integrals:
    '''
    Sums the simplex formulas over the triangulation in integer arithmetic: all points are scaled
    to a common denominator first, so only the three totals are ever reduced.
    '''
    n = p.n
    simplices = p.simplices
    points = list(unique_everseen(v for s in simplices for v in s))
    den = _common_denominator(x for v in points for x in v)
    gden = _common_denominator(x for row in p.gram for x in row)
    gi = [[int(x * gden) for x in row] for row in p.gram]

    scaled: Dict[RatVec, Tuple[Tuple[int, ...], Tuple[int, ...], int]] = {}
    for v in points:
        z = tuple(int(x * den) for x in v)
        gz = tuple(sum(a * b for a, b in zip(row, z)) for row in gi)
        scaled[v] = (z, gz, sum(a * b for a, b in zip(z, gz)))

    vol = 0
    first = [0] * n
    second = 0
    for s in simplices:
        zs = [scaled[v] for v in s]
        z0 = zs[0][0]
        d = abs(int_det([[a - b for a, b in zip(z, z0)] for z, _, _ in zs[1:]]))
        tot = [sum(z[i] for z, _, _ in zs) for i in range(n)]
        gtot = [sum(gz[i] for _, gz, _ in zs) for i in range(n)]
        vol += d
        for i in range(n):
            first[i] += d * tot[i]
        second += d * (sum(q for _, _, q in zs) + sum(a * b for a, b in zip(tot, gtot)))

    base = factorial(n) * den ** n
    return Integrals(
        volume=Fraction(vol, base),
        first=tuple(Fraction(x, base * (n + 1) * den) for x in first),
        second=Fraction(second, base * (n + 1) * (n + 2) * den * den * gden),
    )


def volume(p: Polytope) -> Fraction:
    return p.integrals.volume


def second_moment(p: Polytope, c: Optional[Iterable] = None) -> Fraction:
    if c is None:
        return p.integrals.second
    return p.integrals.about(vec(c), p.gram)


def moments(p: Polytope, c: Optional[Iterable] = None) -> MomentData:
    cc = zeros(p.n) if c is None else vec(c)
    return MomentData(volume=volume(p), second_moment=second_moment(p, cc), center=cc)


def centroid(p: Polytope) -> RatVec:
    i = p.integrals
    return scale(1 / i.volume, i.first)


def first_moment(p: Polytope, c: Optional[Iterable] = None) -> RatVec:
    '''∫_P (x - c) dx'''
    i = p.integrals
    if c is None:
        return i.first
    return sub(i.first, scale(i.volume, vec(c)))


### boxes

class Box(NamedTuple):
    # direction vectors G⁻¹ℓ of the facet pairs, pairwise G-orthogonal
    axes: Tuple[RatVec, ...]
    # squared Q_G-lengths of the semi-axes
    semi_axes_sq: Tuple[Fraction, ...]


class NotBox(NamedTuple):
    reason: str


BoxVerdict = Union[Box, NotBox]


def is_rectangular_box(p: Polytope) -> BoxVerdict:
    if not is_centrally_symmetric(p):
        raise NotCentrallySymmetric(f'{p} is not symmetric about the origin')
    n = p.n
    if len(p.halfspaces) != 2 * n:
        return NotBox(f'{len(p.halfspaces)} facets, expected {2 * n}')
    ginv = inverse(p.gram)
    positive = [h for h in p.halfspaces if next(x for x in h.functional if x != 0) > 0]
    for h in positive:
        if HalfSpace(neg(h.functional), h.offset) not in p.halfspaces:
            return NotBox(f'facet {h} has no opposite facet')
    positive.sort(key=lambda h: h.functional, reverse=True)
    dirs = [mat_vec(ginv, h.functional) for h in positive]
    for i, j in combinations(range(len(positive)), 2):
        ip = dot(positive[i].functional, dirs[j])  # ℓ_i G⁻¹ ℓ_j
        if ip != 0:
            return NotBox(f'facet normals {i} and {j} are not orthogonal')
    semi = tuple(h.offset ** 2 / dot(h.functional, d) for h, d in zip(positive, dirs))
    return Box(axes=tuple(dirs), semi_axes_sq=semi)


### json

def dump(p: Polytope) -> Dict[str, Any]:
    return {
        'n': p.n,
        'gram': [[format_rat(x) for x in row] for row in p.gram],
        'halfspaces': [{'l': [format_rat(x) for x in h.functional], 'b': format_rat(h.offset)} for h in p.halfspaces],
        'vertices': [[format_rat(x) for x in v] for v in p.vertices],
    }


def load(js: Dict[str, Any]) -> Polytope:
    gram = mat(js['gram'])
    hs = [halfspace(h['l'], h['b']) for h in js['halfspaces']]
    return _assemble(len(gram), gram, hs, [vec(v) for v in js['vertices']])
