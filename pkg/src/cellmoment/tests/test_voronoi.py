from __future__ import annotations

import pytest

from ..catalog import CATALOG, by_name
from ..exactnum import identity
from ..hlrverify import check_nonobtuse
from ..lattice import closest_vectors, new_lattice, qform, scaled
from ..polytope import Box, DimensionCapExceeded, is_centrally_symmetric, is_rectangular_box, volume
from ..voronoi import (
    DeepHole,
    DelaunayCell,
    NotADeepHole,
    covering_radius_sq,
    deep_holes,
    delaunay_cell_at,
    normalized_second_moment,
    verify_empty_sphere,
    voronoi_cell,
)

from .common import F


def lat(name: str):
    return new_lattice(by_name(name).gram)


def test_square_cell() -> None:
    p = voronoi_cell(lat('Z2'))
    h = F('1/2')
    assert p.vertices == ((-h, -h), (-h, h), (h, -h), (h, h))
    assert covering_radius_sq(lat('Z2')) == F('1/2')


def test_hexagonal_cell() -> None:
    a2 = lat('A2')
    p = voronoi_cell(a2)
    assert len(p.halfspaces) == 6
    assert len(p.vertices) == 6
    assert volume(p) == 1
    assert covering_radius_sq(a2) == F('1/3')
    holes = deep_holes(a2)
    assert len(holes) == 6
    assert holes[0] == DeepHole(t=(F('-2/3'), F('1/3')), r_sq=F('1/3'))


def test_rectangular_cell() -> None:
    l = lat('diag(1,4)')
    p = voronoi_cell(l)
    assert len(p.vertices) == 4
    b = is_rectangular_box(p)
    assert isinstance(b, Box)
    assert b.semi_axes_sq == (F('1/4'), 1)
    assert covering_radius_sq(l) == F('5/4')


@pytest.mark.parametrize('n', [1, 2, 3, 4, 5])
def test_cubic_covering_radius(n: int) -> None:
    assert covering_radius_sq(new_lattice(identity(n))) == F(n, 4)


def test_one_dimensional() -> None:
    z1 = lat('Z1')
    holes = deep_holes(z1)
    assert [h.t for h in holes] == [(F('-1/2'),), (F('1/2'),)]
    assert all(h.r_sq == F('1/4') for h in holes)
    cell = delaunay_cell_at(z1, DeepHole(t=(F('1/2'),), r_sq=F('1/4')))
    assert cell.vertices == [(-1,), (0,)]
    assert cell.center == (F('-1/2'),)


def test_delaunay_square() -> None:
    z2 = lat('Z2')
    h = F('1/2')
    cell = delaunay_cell_at(z2, DeepHole(t=(h, h), r_sq=h))
    assert cell.vertices == [(-1, -1), (-1, 0), (0, -1), (0, 0)]
    assert verify_empty_sphere(z2, cell).passed

    bad = verify_empty_sphere(z2, DelaunayCell(center=(0, 0), r_sq=1, vertices=[]))
    assert not bad.passed
    assert bad.witness == (0, 0)

    with pytest.raises(NotADeepHole):
        delaunay_cell_at(z2, DeepHole(t=(h, h), r_sq=F('1/4')))


def test_delaunay_triangle() -> None:
    a2 = lat('A2')
    for hole in deep_holes(a2):
        cell = delaunay_cell_at(a2, hole)
        assert len(cell.vertices) == 3
        assert verify_empty_sphere(a2, cell).passed
        assert check_nonobtuse(cell.vertices, a2.gram).passed


@pytest.mark.parametrize('entry', CATALOG, ids=lambda e: e.name)
def test_catalog_cells(entry) -> None:
    l = new_lattice(entry.gram)
    p = voronoi_cell(l)
    assert volume(p) == 1
    assert is_centrally_symmetric(p)
    assert sorted(tuple(-x for x in v) for v in p.vertices) == list(p.vertices)
    r2 = covering_radius_sq(l, p)
    if entry.r_sq is not None:
        assert r2 == entry.r_sq
    holes = deep_holes(l, p)
    assert max(h.r_sq for h in holes) == r2
    for hole in holes:
        assert closest_vectors(l, hole.t).dist_sq == qform(l, hole.t)


def test_scaling() -> None:
    a2 = lat('A2')
    big = scaled(a2, 4)
    assert covering_radius_sq(big) == 4 * covering_radius_sq(a2)
    assert voronoi_cell(big).vertices == voronoi_cell(a2).vertices


def test_cap() -> None:
    with pytest.raises(DimensionCapExceeded):
        voronoi_cell(lat('Z3'), cap=2)


def test_normalized_second_moment() -> None:
    assert normalized_second_moment(lat('Z3')) == pytest.approx(1 / 12)
    # 5/(36√3)
    assert normalized_second_moment(lat('A2')) == pytest.approx(0.0801875, abs=1e-6)
    assert normalized_second_moment(lat('D4')) == pytest.approx(0.0766032, abs=1e-6)
