"""
Full-rank lattices given by a rational Gram matrix.

Lattice points are the integer coordinate vectors; the geometry lives entirely in the quadratic
form Q_G(x) = xᵀGx, so lattices with irrational embeddings (A₂, D₄, ...) stay exact.
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, isqrt
from typing import List, NamedTuple, Sequence, Tuple

from .common import logger
from .exactnum import (
    DimensionMismatch,
    RatMat,
    RatVec,
    binary_vectors,
    dot,
    ldl_decompose,
    mat,
    parse_rat,
    scale,
    transpose,
    vec,
)


LatticePoint = Tuple[int, ...]
Coords = Sequence[Fraction | int]


class GramLattice(NamedTuple):
    n: int
    gram: RatMat
    # G = L·D·Lᵀ, kept around for enumeration
    ldl_l: RatMat
    ldl_d: RatVec


class CosetSystem(NamedTuple):
    reps: Tuple[LatticePoint, ...]


class ClosestVectors(NamedTuple):
    dist_sq: Fraction
    minimizers: List[LatticePoint]


def new_lattice(gram: Sequence[Sequence]) -> GramLattice:
    g = mat(gram)
    l, d = ldl_decompose(g)  # raises NotSymmetric/NotPositiveDefinite
    n = len(g)
    return GramLattice(n=n, gram=g, ldl_l=l, ldl_d=tuple(d[i][i] for i in range(n)))


def from_basis(basis: Sequence[Sequence]) -> GramLattice:
    '''
    Each column is a basis vector (possibly in a higher-dimensional ambient space), so G = BᵀB.
    '''
    cols = transpose(mat(basis))
    gram = tuple(tuple(dot(a, b) for b in cols) for a in cols)
    return new_lattice(gram)


def scaled(lat: GramLattice, k: Fraction | int) -> GramLattice:
    kk = parse_rat(k)
    return new_lattice(tuple(scale(kk, row) for row in lat.gram))


def inner(lat: GramLattice, x: Coords, y: Coords) -> Fraction:
    g = lat.gram
    return Fraction(sum((x[i] * g[i][j] * y[j] for i in range(lat.n) for j in range(lat.n) if x[i] and y[j]), Fraction(0)))


def qform(lat: GramLattice, x: Coords) -> Fraction:
    return inner(lat, x, x)


def _check_dim(lat: GramLattice, x: Sequence) -> None:
    if len(x) != lat.n:
        raise DimensionMismatch(f'expected a vector of length {lat.n}, got {len(x)}')


def _integer_window(m: Fraction, q: Fraction) -> range:
    '''
    All integers w with (w - m)² <= q, without taking square roots.
    '''
    if q < 0:
        return range(0)
    b = isqrt(ceil(q)) + 1  # b >= sqrt(q)
    lo = floor(m) - b
    while lo <= m + b and (lo - m) ** 2 > q:
        lo += 1
    hi = ceil(m) + b
    while hi >= lo and (hi - m) ** 2 > q:
        hi -= 1
    return range(lo, hi + 1)


def _search(lat: GramLattice, center: RatVec, r_sq: Fraction, *, shrink: bool) -> List[Tuple[Fraction, LatticePoint]]:
    '''
    Depth-first Fincke-Pohst walk over the LDL coordinates, last coordinate first.
    With shrink=True the radius drops to the best distance found so far and only the minimizers are kept.
    '''
    n = lat.n
    l = lat.ldl_l
    d = lat.ldl_d
    x = [0] * n
    found: List[Tuple[Fraction, LatticePoint]] = []
    bound = [r_sq]

    def rec(i: int, partial: Fraction) -> None:
        s = sum((l[j][i] * (x[j] - center[j]) for j in range(i + 1, n)), Fraction(0))
        m = center[i] - s
        for w in _integer_window(m, (bound[0] - partial) / d[i]):
            x[i] = w
            y = w - m
            part = partial + d[i] * y * y
            if part > bound[0]:
                continue
            if i > 0:
                rec(i - 1, part)
                continue
            if shrink and part < bound[0]:
                bound[0] = part
                found.clear()
            found.append((part, tuple(x)))

    rec(n - 1, Fraction(0))
    return found


def enumerate_in_ball(lat: GramLattice, center: Coords, r_sq: Fraction | int) -> List[LatticePoint]:
    '''
    Every w in ℤⁿ with Q_G(w - center) <= r², sorted lexicographically.
    '''
    _check_dim(lat, center)
    c = vec(center)
    r2 = parse_rat(r_sq)
    if r2 < 0:
        return []
    return sorted(p for _, p in _search(lat, c, r2, shrink=False))


def babai_point(lat: GramLattice, target: Coords) -> LatticePoint:
    '''
    Nearest-plane rounding along the LDL coordinates; a cheap upper bound for the CVP search.
    '''
    _check_dim(lat, target)
    n = lat.n
    l = lat.ldl_l
    x = [0] * n
    for i in reversed(range(n)):
        s = sum((l[j][i] * (x[j] - target[j]) for j in range(i + 1, n)), Fraction(0))
        x[i] = round(Fraction(target[i]) - s)
    return tuple(x)


def closest_vectors(lat: GramLattice, target: Coords) -> ClosestVectors:
    _check_dim(lat, target)
    t = vec(target)
    w0 = babai_point(lat, t)
    bound = qform(lat, [a - b for a, b in zip(w0, t)])
    found = _search(lat, t, bound, shrink=True)
    assert len(found) > 0, (target, w0)  # w0 itself is always within the bound
    dist_sq = min(d for d, _ in found)
    minimizers = sorted(p for d, p in found if d == dist_sq)
    return ClosestVectors(dist_sq=dist_sq, minimizers=minimizers)


def lattice_minimum(lat: GramLattice) -> ClosestVectors:
    '''
    Shortest nonzero Q_G value and all vectors attaining it.
    '''
    r2 = min(lat.gram[i][i] for i in range(lat.n))
    origin = (0,) * lat.n
    pts = [p for p in enumerate_in_ball(lat, origin, r2) if p != origin]
    m = min(qform(lat, p) for p in pts)
    return ClosestVectors(dist_sq=m, minimizers=[p for p in pts if qform(lat, p) == m])


def coset_system(lat: GramLattice) -> CosetSystem:
    return CosetSystem(reps=tuple(binary_vectors(lat.n)))


def relevant_vectors(lat: GramLattice) -> List[LatticePoint]:
    '''
    v is Voronoi-relevant iff ±v are the only minimizers of Q_G over the coset v + 2Λ.
    The minimizers of Q_G(c + 2u) are the lattice points u closest to -c/2.
    '''
    res: List[LatticePoint] = []
    for c in coset_system(lat).reps[1:]:
        target = tuple(Fraction(-ci, 2) for ci in c)
        cv = closest_vectors(lat, target)
        if len(cv.minimizers) == 2:
            res.extend(tuple(ci + 2 * ui for ci, ui in zip(c, u)) for u in cv.minimizers)
    res.sort()
    logger.debug('%d relevant vectors for gram %s', len(res), lat.gram)
    return res
