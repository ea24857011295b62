from __future__ import annotations

from datetime import timedelta
from fractions import Fraction
from itertools import product
from math import floor, sqrt
from typing import Any, List, Sequence, Tuple, TypeVar

from ..common import Res
from ..exactnum import inverse, vec
from ..lattice import GramLattice, LatticePoint, babai_point, qform


HSETTINGS: dict[str, Any] = dict(
    derandomize=True,
    deadline=timedelta(seconds=10),  # exact arithmetic is slow-ish
)


V = TypeVar('V')

def unwrap(r: Res[V]) -> V:
    assert not isinstance(r, Exception), r
    return r


def F(s: str | int, d: int = 1) -> Fraction:
    return Fraction(s) if d == 1 else Fraction(s, d)


def brute_closest(lat: GramLattice, target: Sequence) -> Tuple[Fraction, List[LatticePoint]]:
    '''
    Scans a coordinate box that provably contains every closest point: Q(x) <= r² forces x_i² <= r²·(G⁻¹)_ii.
    '''
    t = vec(target)
    w0 = babai_point(lat, t)
    r2 = qform(lat, [a - b for a, b in zip(w0, t)])
    ginv = inverse(lat.gram)
    ranges = []
    for i in range(lat.n):
        k = floor(sqrt(float(r2 * ginv[i][i]))) + 2
        ranges.append(range(floor(t[i]) - k, floor(t[i]) + k + 2))
    best: Fraction | None = None
    found: List[LatticePoint] = []
    for w in product(*ranges):
        d = qform(lat, [a - b for a, b in zip(w, t)])
        if best is None or d < best:
            best, found = d, [w]
        elif d == best:
            found.append(w)
    assert best is not None
    return best, sorted(found)


def brute_relevant(lat: GramLattice, box: int = 3) -> List[LatticePoint]:
    '''
    Coset minima mod 2Λ over a coordinate box: v is relevant iff ±v are the only shortest vectors of v + 2Λ.
    '''
    n = lat.n
    by_coset: dict = {}
    for w in product(range(-box, box + 1), repeat=n):
        if all(x == 0 for x in w):
            continue
        key = tuple(x % 2 for x in w)
        by_coset.setdefault(key, []).append((qform(lat, w), w))
    res = []
    for items in by_coset.values():
        m = min(q for q, _ in items)
        mins = [w for q, w in items if q == m]
        if len(mins) == 2:
            res.extend(mins)
    return sorted(res)
