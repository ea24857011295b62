from .lattice import GramLattice, new_lattice, from_basis
from .polytope import Polytope
from .voronoi import voronoi_cell, covering_radius_sq, deep_holes
from .hlrverify import ProofReport, verify_main, classify_equality
