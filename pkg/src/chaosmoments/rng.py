"""Counter-based random streams.

Every stochastic routine in the package derives its generator from a
(master_seed, stream_index) pair through a Philox counter-based bit
generator, so results are reproducible regardless of how work is split
across threads.
"""

import numpy as np

# Stream-index offsets reserve disjoint id ranges for different consumers
# (Monte Carlo batches, ensemble generation, solver restarts).
MC_STREAM = 0
ENSEMBLE_STREAM = 1 << 32
RESTART_STREAM = 1 << 33


def stream(master_seed, index):
    """Independent generator for the given (master seed, stream index)."""
    key = np.array([np.uint64(master_seed), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
