"""
Voronoi cells, covering radii, deep holes and Delaunay cells of a Gram lattice.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import List, NamedTuple, Optional

from .common import logger
from .exactnum import RatVec, det, mat_vec, neg, sub
from .lattice import GramLattice, LatticePoint, closest_vectors, enumerate_in_ball, qform, relevant_vectors
from .polytope import DimensionCapExceeded, Polytope, from_halfspaces, halfspace, second_moment


class NotADeepHole(Exception):
    pass


class DeepHole(NamedTuple):
    t: RatVec
    r_sq: Fraction


class DelaunayCell(NamedTuple):
    # sphere center; the cell of the deep hole t sits at -t
    center: RatVec
    r_sq: Fraction
    vertices: List[LatticePoint]


class EmptySphere(NamedTuple):
    passed: bool
    # a lattice point strictly inside the sphere
    witness: Optional[LatticePoint] = None


@lru_cache(maxsize=64)
def _voronoi_cell(lat: GramLattice) -> Polytope:
    hs = []
    for v in relevant_vectors(lat):
        # ⟨x, v⟩_G <= Q_G(v)/2
        hs.append(halfspace(mat_vec(lat.gram, v), qform(lat, v) / 2))
    # cap was checked by the caller
    return from_halfspaces(hs, lat.gram, cap=lat.n)


def voronoi_cell(lat: GramLattice, *, cap: Optional[int] = None) -> Polytope:
    from .config import dimension_cap
    limit = dimension_cap(cap)
    if lat.n > limit:
        raise DimensionCapExceeded(f'dimension {lat.n} is above the cap {limit}')
    cell = _voronoi_cell(lat)
    logger.debug('voronoi cell: %s', cell)
    return cell


def covering_radius_sq(lat: GramLattice, cell: Optional[Polytope] = None) -> Fraction:
    p = voronoi_cell(lat) if cell is None else cell
    return max(qform(lat, v) for v in p.vertices)


def deep_holes(lat: GramLattice, cell: Optional[Polytope] = None) -> List[DeepHole]:
    p = voronoi_cell(lat) if cell is None else cell
    r2 = covering_radius_sq(lat, p)
    res = []
    for v in p.vertices:
        if qform(lat, v) != r2:
            continue
        d = closest_vectors(lat, v).dist_sq
        if d != r2:
            raise NotADeepHole(f'{v}: distance² to the lattice is {d}, expected {r2}')
        res.append(DeepHole(t=v, r_sq=r2))
    return sorted(res)


def check_deep_hole(lat: GramLattice, hole: DeepHole) -> None:
    q = qform(lat, hole.t)
    if q != hole.r_sq:
        raise NotADeepHole(f'Q(t) = {q} but r² = {hole.r_sq}')
    d = closest_vectors(lat, hole.t).dist_sq
    if d != hole.r_sq:
        raise NotADeepHole(f'dist²(t, Λ) = {d} but r² = {hole.r_sq}')


def delaunay_cell_at(lat: GramLattice, hole: DeepHole) -> DelaunayCell:
    check_deep_hole(lat, hole)
    center = neg(hole.t)
    cv = closest_vectors(lat, center)
    # Λ is symmetric, so the sphere around -t is as empty as the one around t
    assert cv.dist_sq == hole.r_sq, (cv, hole)
    cell = DelaunayCell(center=center, r_sq=hole.r_sq, vertices=cv.minimizers)
    es = verify_empty_sphere(lat, cell)
    if not es.passed:
        raise NotADeepHole(f'lattice point {es.witness} inside the sphere around {center}')
    return cell


def verify_empty_sphere(lat: GramLattice, cell: DelaunayCell) -> EmptySphere:
    for w in enumerate_in_ball(lat, cell.center, cell.r_sq):
        if qform(lat, sub(w, cell.center)) < cell.r_sq:
            return EmptySphere(passed=False, witness=w)
    return EmptySphere(passed=True)


def normalized_second_moment(lat: GramLattice, cell: Optional[Polytope] = None) -> float:
    '''
    The dimensionless quantizer constant ∫_P Q_G / (n · det(G)^{1/n}); 1/12 for ℤⁿ.
    The Jacobian factors cancel, so coordinate measure gives the physical value.
    '''
    p = voronoi_cell(lat) if cell is None else cell
    n = lat.n
    return float(second_moment(p)) / (n * float(det(lat.gram)) ** (1 / n))
