"""
Named lattices with known exact values, and seeded random Gram matrices.
"""
from __future__ import annotations

from fractions import Fraction
import random
from typing import Iterable, List, NamedTuple, Optional, Sequence

from .common import logger
from .exactnum import NotPositiveDefinite, RatMat, det, diag, dot, format_rat, identity, mat, parse_rat, transpose
from .lattice import new_lattice


class CatalogEntry(NamedTuple):
    name: str
    gram: RatMat
    # known exact values, where there is a closed form
    r_sq: Optional[Fraction] = None
    ratio: Optional[Fraction] = None
    verdict: Optional[str] = None
    note: str = ''


def entry(
        name: str,
        gram: Sequence[Sequence],
        *,
        r_sq: Optional[object] = None,
        ratio: Optional[object] = None,
        verdict: Optional[str] = None,
        note: str = '',
) -> CatalogEntry:
    g = mat(gram)
    new_lattice(g)  # validates
    return CatalogEntry(
        name=name,
        gram=g,
        r_sq=None if r_sq is None else parse_rat(r_sq),
        ratio=None if ratio is None else parse_rat(ratio),
        verdict=verdict,
        note=note,
    )


def _cubic(n: int) -> CatalogEntry:
    return entry(f'Z{n}', identity(n), r_sq=Fraction(n, 4), ratio=1, verdict='Equality', note='cubic lattice, P = [-1/2, 1/2]^n')


CATALOG: List[CatalogEntry] = [
    *(_cubic(n) for n in range(1, 6)),
    entry(
        'A2', [['1', '1/2'], ['1/2', '1']],
        r_sq='1/3', ratio='5/4', verdict='Strict',
        note='hexagonal lattice, basis vectors at 60 degrees; P is a regular hexagon',
    ),
    entry(
        'D3', [[2, 1, 1], [1, 2, 1], [1, 1, 2]],
        r_sq=1, verdict='Strict',
        note='face-centred cubic, minimal norm 2; P is the rhombic dodecahedron',
    ),
    entry(
        'D4', [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]],
        r_sq=1, verdict='Strict',
        note='Cartan matrix of D4; P is the 24-cell',
    ),
    entry('diag(1,4)', diag([1, 4]), r_sq='5/4', ratio=1, verdict='Equality', note='rectangular, semi-axes² 1/4 and 1'),
    entry('diag(1,4,9)', diag([1, 4, 9]), r_sq='7/2', ratio=1, verdict='Equality', note='rectangular, semi-axes² 1/4, 1 and 9/4'),
]


def all_entries() -> List[CatalogEntry]:
    from . import config
    extra = config.get().lattices if config.has() else []
    return [*CATALOG, *extra]


def by_name(name: str) -> CatalogEntry:
    for e in all_entries():
        if e.name == name:
            return e
    known = ', '.join(e.name for e in all_entries())
    raise KeyError(f'unknown lattice {name!r} (known: {known})')


# basis entries are k/8 for -16 <= k <= 16
_STEPS = [Fraction(k, 8) for k in range(-16, 17)]
_MIN_DET_RATIO = Fraction(1, 100)
PERTURBATION = Fraction(1, 10)


def _well_conditioned(g: RatMat) -> bool:
    prod = Fraction(1)
    for i in range(len(g)):
        prod *= g[i][i]
    return det(g) >= _MIN_DET_RATIO * prod


def random_grams(
        n: int,
        count: int,
        seed: int,
        *,
        diagonal_only: bool = False,
        perturb: bool = False,
) -> List[CatalogEntry]:
    '''
    G = BᵀB over random rational bases B, read column by column as in from_basis.
    With perturb, G[0][1] = G[1][0] = 1/10 afterwards (mostly useful with diagonal_only).
    Ill-conditioned and non positive definite draws are rejected and redrawn.
    '''
    if perturb and n < 2:
        raise ValueError('perturbation needs n >= 2')
    rng = random.Random(seed)
    res: List[CatalogEntry] = []
    rejected = 0
    while len(res) < count:
        if diagonal_only:
            basis = diag([rng.choice(_STEPS) for _ in range(n)])
        else:
            basis = tuple(tuple(rng.choice(_STEPS) for _ in range(n)) for _ in range(n))
        cols = transpose(basis)
        gram = [[dot(a, b) for b in cols] for a in cols]
        if perturb:
            gram[0][1] = gram[1][0] = PERTURBATION
        g = mat(gram)
        try:
            new_lattice(g)
        except NotPositiveDefinite:
            rejected += 1
            continue
        if not _well_conditioned(g):
            rejected += 1
            continue
        i = len(res)
        res.append(CatalogEntry(name=f'random-n{n}-s{seed}-{i}', gram=g, note='random' + (' diagonal' if diagonal_only else '') + (' perturbed' if perturb else '')))
    logger.debug('random grams: %d accepted, %d rejected', len(res), rejected)
    return res


def describe(entries: Iterable[CatalogEntry]) -> List[dict]:
    def opt(x: Optional[Fraction]) -> Optional[str]:
        return None if x is None else format_rat(x)
    return [
        {
            'name': e.name,
            'n': len(e.gram),
            'gram': [[format_rat(x) for x in row] for row in e.gram],
            'R2': opt(e.r_sq),
            'ratio': opt(e.ratio),
            'verdict': e.verdict,
            'note': e.note,
        }
        for e in entries
    ]
