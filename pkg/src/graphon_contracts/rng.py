"""Counter-based random streams keyed by (master seed, purpose, index).

Every logical task draws from its own Philox stream, so a result depends only
on the seed and on which task asked, never on scheduling or worker count.
"""

import numpy as np

INITIAL_OUTPUTS = 1
PARTICLE_NOISE = 2
TAGGED_NOISE = 3
AGENT_NOISE = 4


def stream(seed, *key) -> np.random.Generator:
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer, got %r" % seed)
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
