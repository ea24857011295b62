"""
Floating point sanity check of the exact volume and second moment: uniform samples from the vertex
bounding box, kept if they fall inside the Voronoi cell.

Inside the cell means the origin is a closest lattice point, which for the Voronoi cell is exactly
the relevant-vector inequalities ⟨x, v⟩_G <= Q_G(v)/2, i.e. the cell's facets.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .common import logger, measure
from .polytope import Polytope, second_moment, volume


# rows per batch, keeps the sample matrix small
CHUNK = 200_000


class MonteCarlo(NamedTuple):
    samples: int
    seed: int
    volume: float
    second_moment: float
    exact_volume: float
    exact_second_moment: float

    @property
    def volume_deviation(self) -> float:
        return abs(self.volume - self.exact_volume) / self.exact_volume

    @property
    def moment_deviation(self) -> float:
        return abs(self.second_moment - self.exact_second_moment) / self.exact_second_moment


def estimate(cell: Polytope, samples: int, seed: int = 0) -> MonteCarlo:
    if samples <= 0:
        raise ValueError(f'need a positive number of samples, got {samples}')
    verts = np.array(cell.vertices, dtype=float)
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    box = float(np.prod(hi - lo))

    a = np.array([h.functional for h in cell.halfspaces], dtype=float)
    b = np.array([h.offset for h in cell.halfspaces], dtype=float)
    g = np.array(cell.gram, dtype=float)

    rng = np.random.default_rng(seed)
    hits = 0
    acc = 0.0
    with measure(f'montecarlo {samples}', logger=logger):
        left = samples
        while left > 0:
            m = min(left, CHUNK)
            x = rng.uniform(lo, hi, size=(m, cell.n))
            inside = np.all(x @ a.T <= b, axis=1)
            xin = x[inside]
            hits += int(inside.sum())
            acc += float(np.einsum('ij,jk,ik->', xin, g, xin))
            left -= m

    res = MonteCarlo(
        samples=samples,
        seed=seed,
        volume=box * hits / samples,
        second_moment=box * acc / samples,
        exact_volume=float(volume(cell)),
        exact_second_moment=float(second_moment(cell)),
    )
    logger.debug('montecarlo: volume %.6f (exact %.6f), moment %.6f (exact %.6f)', res.volume, res.exact_volume, res.second_moment, res.exact_second_moment)
    return res
