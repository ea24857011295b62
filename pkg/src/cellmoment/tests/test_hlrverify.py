from __future__ import annotations

import pytest

from ..catalog import CATALOG, by_name, random_grams
from ..exactnum import ZERO, identity, mat
from ..hlrverify import (
    Equality,
    IncompletePieces,
    Strict,
    WrongCardinality,
    check_box_vertexset,
    check_nonobtuse,
    classify_equality,
    half_lattice_distance_integral,
    tessellation_pieces,
    verify_all_deep_holes,
    verify_eq1,
    verify_eq2,
    verify_eq3_aggregate,
    verify_eq5,
    verify_main,
)
from ..lattice import new_lattice
from ..polytope import Box, NotBox, is_rectangular_box, second_moment, volume
from ..voronoi import DeepHole, deep_holes, delaunay_cell_at, voronoi_cell

from .common import F


def lat(name: str):
    return new_lattice(by_name(name).gram)


HALF = F('1/2')


def test_pieces_z1() -> None:
    z1 = lat('Z1')
    cell = voronoi_cell(z1)
    hole = DeepHole(t=(HALF,), r_sq=F('1/4'))
    pieces = tessellation_pieces(z1, cell, hole)
    assert [p.v for p in pieces] == [(-1,), (0,)]
    assert pieces[0].region.vertices == ((-HALF,), (0,))
    assert pieces[1].region.vertices == ((0,), (HALF,))
    assert pieces[1].center == (F('1/4'),)
    assert [p.about_origin.second_moment for p in pieces] == [F('1/24'), F('1/24')]

    eq1 = verify_eq1(cell, pieces)
    assert eq1.passed
    assert eq1.lhs == eq1.rhs == F('1/12')

    eq2 = verify_eq2(pieces[1])
    assert eq2.passed
    assert eq2.lhs == F('4/96')
    assert pieces[1].about_center.second_moment == F('1/96')

    assert half_lattice_distance_integral(z1, cell, hole) == F('1/48')
    eq3, rhs = verify_eq3_aggregate(z1, cell, pieces, hole)
    assert eq3.passed and eq3.tight
    assert eq3.lhs == rhs == F('1/48')

    eq5 = verify_eq5(z1, hole)
    assert eq5.passed
    assert eq5.lhs == F('1/16')


def test_pieces_z2() -> None:
    z2 = lat('Z2')
    cell = voronoi_cell(z2)
    hole = DeepHole(t=(HALF, HALF), r_sq=HALF)
    pieces = tessellation_pieces(z2, cell, hole)
    assert len(pieces) == 4
    assert all(p.about_origin.volume == F('1/4') for p in pieces)
    assert verify_eq1(cell, pieces).rhs == F('1/6')
    assert all(verify_eq2(p).passed for p in pieces)
    assert half_lattice_distance_integral(z2, cell, hole) == F('1/24')
    assert verify_eq5(z2, hole).lhs == F('1/8')


def test_missing_piece() -> None:
    z2 = lat('Z2')
    cell = voronoi_cell(z2)
    pieces = tessellation_pieces(z2, cell, DeepHole(t=(HALF, HALF), r_sq=HALF))
    with pytest.raises(IncompletePieces):
        verify_eq1(cell, pieces[1:])


def test_hexagonal() -> None:
    a2 = lat('A2')
    report = verify_main(a2, name='A2')
    assert report.passed
    assert report.k == 3
    assert report.r_sq == F('1/3')
    assert report.volume == 1
    assert report.second_moment == F('5/36')
    assert report.ratio == F('5/4')
    assert report.gap == F('1/36')
    v = report.verdict
    assert isinstance(v, Strict)
    assert v.gap == F('1/36')
    assert v.first_failure in [c.name for c in v.checks if not c.passed]
    [eq3] = [r for r in report.records if r.eq == 'Eq3agg']
    assert eq3.lhs > eq3.rhs


@pytest.mark.parametrize('n', [1, 2, 3, 4])
def test_cubic_equality(n: int) -> None:
    report = verify_main(new_lattice(identity(n)), name=f'Z{n}')
    assert report.passed
    assert report.r_sq == F(n, 4)
    assert report.volume == 1
    assert report.second_moment == F(n, 12)
    assert 3 * report.second_moment == report.r_sq * report.volume
    v = report.verdict
    assert isinstance(v, Equality)
    assert v.k == 2 ** n
    assert v.semi_axes_sq == (F('1/4'),) * n
    assert len(v.delaunay_vertices) == 2 ** n


@pytest.mark.parametrize('name,axes', [
    ('diag(1,4)', ('1/4', '1')),
    ('diag(1,4,9)', ('1/4', '1', '9/4')),
])
def test_rectangular_equality(name: str, axes) -> None:
    report = verify_main(lat(name), name=name)
    assert report.passed
    assert report.r_sq == sum(F(a) for a in axes)
    v = report.verdict
    assert isinstance(v, Equality)
    assert v.semi_axes_sq == tuple(F(a) for a in axes)


def test_perturbed_square_is_strict() -> None:
    v = classify_equality(new_lattice([[1, '1/10'], ['1/10', 1]]))
    assert isinstance(v, Strict)
    assert v.gap > 0


def _verified(entries) -> None:
    for e in entries:
        l = new_lattice(e.gram)
        report = verify_main(l, name=e.name)
        assert report.passed, [r for r in report.records if not r.passed]
        cell = voronoi_cell(l)
        [eq1] = [r for r in report.records if r.eq == 'Eq1']
        assert eq1.lhs == eq1.rhs == second_moment(cell)
        [eq7] = [r for r in report.records if r.eq == 'Eq7']
        assert eq7.lhs == second_moment(cell) / 4
        is_box = isinstance(is_rectangular_box(cell), Box)
        equal = 3 * report.second_moment == report.r_sq * report.volume
        assert isinstance(report.verdict, Equality) == equal == is_box
        if e.verdict is not None:
            assert type(report.verdict).__name__ == e.verdict
        if e.ratio is not None:
            assert report.ratio == e.ratio


# the batch budget covers the whole catalog plus the random corpus
SWEEP = [
    pytest.param(e, id=e.name, marks=pytest.mark.timeout(60 if len(e.gram) >= 5 else 20))
    for e in CATALOG if e.name != 'D4'  # test_d4 has its own budget
]


@pytest.mark.parametrize('entry', SWEEP)
def test_catalog(entry) -> None:
    _verified([entry])


@pytest.mark.timeout(5)
def test_cubic_budget() -> None:
    for n in (1, 2, 3, 4):
        assert isinstance(verify_main(new_lattice(identity(n))).verdict, Equality)


def test_half_lattice_integral_adds_up() -> None:
    for name in ('Z2', 'A2', 'D3'):
        l = lat(name)
        cell = voronoi_cell(l)
        hole = deep_holes(l, cell)[0]
        pieces = tessellation_pieces(l, cell, hole)
        whole = half_lattice_distance_integral(l, cell, hole)
        _, per_piece = verify_eq3_aggregate(l, cell, pieces, hole)
        assert whole == per_piece == second_moment(cell) / 4


@pytest.mark.timeout(120)
@pytest.mark.parametrize('entry', CATALOG, ids=lambda e: e.name)
def test_delaunay_cells_at_every_deep_hole(entry) -> None:
    expected = {
        'Z1': 2, 'Z2': 4, 'Z3': 8, 'Z4': 16, 'Z5': 32,
        'A2': 6, 'D3': 6, 'D4': 24,
        'diag(1,4)': 4, 'diag(1,4,9)': 8,
    }
    l = new_lattice(entry.gram)
    holes = deep_holes(l)
    assert len(holes) == expected[entry.name]
    for hole in holes:
        dcell = delaunay_cell_at(l, hole)
        assert check_nonobtuse(dcell.vertices, l.gram).passed, hole
        if entry.verdict == 'Equality':
            assert len(dcell.vertices) == 2 ** l.n
            assert isinstance(check_box_vertexset(dcell.vertices, l.gram), Box), hole


@pytest.mark.timeout(120)
def test_random_corpus() -> None:
    _verified(random_grams(2, 10, seed=1) + random_grams(3, 10, seed=1))


@pytest.mark.timeout(120)
def test_d4() -> None:
    d4 = lat('D4')
    assert len(voronoi_cell(d4).halfspaces) == 24
    report = verify_main(d4, name='D4')
    assert report.passed
    assert isinstance(report.verdict, Strict)


@pytest.mark.timeout(60)
def test_rectangular_family_both_ways() -> None:
    # random_grams only keeps perturbed draws that stay positive definite and well conditioned
    perturbed = random_grams(2, 5, seed=5, diagonal_only=True, perturb=True) + random_grams(3, 5, seed=5, diagonal_only=True, perturb=True)
    assert len(perturbed) == 10
    for e in perturbed:
        n = len(e.gram)
        g = [[e.gram[i][j] if i == j else ZERO for j in range(n)] for i in range(n)]
        assert isinstance(classify_equality(new_lattice(g)), Equality), g
        v = classify_equality(new_lattice(e.gram))
        assert isinstance(v, Strict), e.gram
        assert v.gap > 0


def test_all_deep_holes() -> None:
    res = verify_all_deep_holes(lat('A2'))
    assert len(res) == 6
    assert all(isinstance(v, Strict) for _, v in res)
    res = verify_all_deep_holes(lat('Z2'))
    assert len(res) == 4
    assert all(isinstance(v, Equality) for _, v in res)


def test_nonobtuse() -> None:
    i2 = identity(2)
    assert check_nonobtuse([(0, 0), (1, 0), (0, 1), (1, 1)], i2).passed
    bad = check_nonobtuse([(0, 0), (4, 0), (2, 1)], i2)
    assert not bad.passed
    assert bad.witness is not None
    assert bad.witness[2] == (2, 1)
    hexagonal = mat([[1, '1/2'], ['1/2', 1]])
    assert check_nonobtuse([(0, 0), (1, 0), (0, 1)], hexagonal).passed
    # fewer than three points
    assert check_nonobtuse([(0, 0), (1, 0)], i2).passed


def test_box_vertexset() -> None:
    i2 = identity(2)
    b = check_box_vertexset([(0, 0), (1, 0), (0, 1), (1, 1)], i2)
    assert isinstance(b, Box)
    assert b.semi_axes_sq == (F('1/4'), F('1/4'))
    assert isinstance(check_box_vertexset([(0, 0), (1, 0), (0, 1), (2, 2)], i2), NotBox)
    cube = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    assert isinstance(check_box_vertexset(cube, identity(3)), Box)
    # very unequal sides
    long = [(0, 0), (1, 0), (0, 10), (1, 10)]
    lb = check_box_vertexset(long, i2)
    assert isinstance(lb, Box)
    assert sorted(lb.semi_axes_sq) == [F('1/4'), 25]
    with pytest.raises(WrongCardinality):
        check_box_vertexset([(0, 0), (1, 0), (0, 1)], i2)
