from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import floor, sqrt
import random

import pytest

from ..catalog import by_name, random_grams
from ..exactnum import NotPositiveDefinite, identity, inverse
from ..lattice import (
    closest_vectors,
    coset_system,
    enumerate_in_ball,
    from_basis,
    lattice_minimum,
    new_lattice,
    qform,
    relevant_vectors,
    scaled,
)

from .common import F, brute_closest, brute_relevant


A2 = [[1, '1/2'], ['1/2', 1]]


def test_new_lattice() -> None:
    z3 = new_lattice(identity(3))
    assert z3.n == 3
    a2 = new_lattice(A2)
    assert a2.ldl_d == (1, F('3/4'))
    m = lattice_minimum(a2)
    assert m.dist_sq == 1
    assert len(m.minimizers) == 6
    with pytest.raises(NotPositiveDefinite):
        new_lattice([[0, 1], [1, 0]])


def test_from_basis() -> None:
    # columns are basis vectors: b1 = (1, 1), b2 = (0, 2)
    lat = from_basis([[1, 0], [1, 2]])
    assert lat.gram == ((2, 2), (2, 4))
    # a basis in a higher-dimensional ambient space
    a2 = from_basis([[1, F('1/2')], [0, F('1/2')], [0, F('1/2')], [0, F('1/2')]])
    assert a2.gram == ((1, F('1/2')), (F('1/2'), 1))


def test_closest_examples() -> None:
    z2 = new_lattice(identity(2))
    cv = closest_vectors(z2, (F('2/5'), 0))
    assert cv.dist_sq == F('4/25')
    assert cv.minimizers == [(0, 0)]

    cv = closest_vectors(z2, (F('1/2'), F('1/2')))
    assert cv.dist_sq == F('1/2')
    assert cv.minimizers == [(0, 0), (0, 1), (1, 0), (1, 1)]

    a2 = new_lattice(A2)
    cv = closest_vectors(a2, (3, -2))
    assert cv.dist_sq == 0
    assert cv.minimizers == [(3, -2)]


def test_enumerate_in_ball() -> None:
    z2 = new_lattice(identity(2))
    pts = enumerate_in_ball(z2, (0, 0), 1)
    assert pts == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]
    assert enumerate_in_ball(z2, (0, 0), -1) == []
    # boundary points are included
    assert enumerate_in_ball(z2, (F('1/2'), 0), F('1/4')) == [(0, 0), (1, 0)]

    # the origin and the six minimal vectors of the hexagonal lattice
    a2 = new_lattice(A2)
    assert enumerate_in_ball(a2, (0, 0), 1) == [(-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0)]


def test_enumerate_in_ball_matches_brute_force() -> None:
    rng = random.Random(33)
    for e in random_grams(3, 5, seed=33):
        lat = new_lattice(e.gram)
        center = tuple(Fraction(rng.randint(-20, 20), rng.choice([2, 3, 5])) for _ in range(3))
        r_sq = max(e.gram[i][i] for i in range(3)) + Fraction(1, 3)
        # Q(w - c) <= r² forces (w_i - c_i)² <= r²·(G⁻¹)_ii
        ginv = inverse(lat.gram)
        ranges = []
        for i in range(3):
            k = floor(sqrt(float(r_sq * ginv[i][i]))) + 2
            ranges.append(range(floor(center[i]) - k, floor(center[i]) + k + 2))
        expected = sorted(
            w for w in product(*ranges)
            if qform(lat, [a - b for a, b in zip(w, center)]) <= r_sq
        )
        assert enumerate_in_ball(lat, center, r_sq) == expected, (e.gram, center)
        assert len(expected) > 0


def test_closest_matches_brute_force() -> None:
    rng = random.Random(2024)
    lats = [new_lattice(e.gram) for n in (2, 3) for e in random_grams(n, 5, seed=n)]
    for i in range(50):
        lat = lats[i % len(lats)]
        target = tuple(Fraction(rng.randint(-40, 40), rng.choice([3, 5, 7, 8])) for _ in range(lat.n))
        cv = closest_vectors(lat, target)
        d, mins = brute_closest(lat, target)
        assert cv.dist_sq == d, (lat.gram, target)
        assert cv.minimizers == mins, (lat.gram, target)


def test_cosets() -> None:
    reps = coset_system(new_lattice(identity(3))).reps
    assert len(reps) == 8
    assert len(set(reps)) == 8
    assert reps[0] == (0, 0, 0)
    assert all(x in (0, 1) for r in reps for x in r)


@pytest.mark.parametrize('name,count', [
    ('Z2', 4),
    ('A2', 6),
    ('Z3', 6),
    ('D3', 12),
    ('D4', 24),
])
def test_relevant_vectors(name: str, count: int) -> None:
    lat = new_lattice(by_name(name).gram)
    rv = relevant_vectors(lat)
    assert len(rv) == count
    assert rv == brute_relevant(lat)
    # closed under negation
    assert sorted(tuple(-x for x in v) for v in rv) == rv


def test_relevant_vectors_random() -> None:
    for e in random_grams(2, 5, seed=7):
        lat = new_lattice(e.gram)
        rv = relevant_vectors(lat)
        # a 2-dimensional Voronoi cell is a rectangle or a hexagon
        assert len(rv) in (4, 6)


def test_scaled() -> None:
    lat = new_lattice(A2)
    big = scaled(lat, 4)
    assert qform(big, (1, 0)) == 4 * qform(lat, (1, 0))
    assert relevant_vectors(big) == relevant_vectors(lat)
