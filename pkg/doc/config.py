'''
Example config for cellmoment, pass it with --config.
Any field you leave out keeps its default (see cellmoment/config.py).
'''

from cellmoment.catalog import entry


# don't enumerate polytope vertices above this dimension
# HLR_CAP in the environment takes priority over this
CAP = 4

# classify the equality case from every deep hole
ALL_DEEP_HOLES = False

# Monte-Carlo cross-check of volume and second moment for each verified lattice, 0 disables it
MC_SAMPLES = 100_000
SEED = 0

# one of 'json', 'csv', 'text'
FORMAT = 'json'

# write verify/random reports here instead of stdout, --out takes priority
# OUTPUT_DIR = '/tmp/cellmoment'


# extra lattices, usable with --name like the built-in ones
LATTICES = [
    # (name, gram) pairs, entries may be ints or 'p/q' strings
    ('tilted', [[2, 1], [1, 2]]),
    ('near-rect', [[1, '1/10'], ['1/10', 4]]),

    # or full catalog entries, if you know the answer
    entry('diag(1,1,4)', [[1, 0, 0], [0, 1, 0], [0, 0, 4]], r_sq='3/2', ratio=1, verdict='Equality', note='rectangular'),
]
