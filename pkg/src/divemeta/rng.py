"""Counter-based random streams keyed by simulation coordinates.

Every stochastic draw in a simulation comes from a Philox generator whose key
is derived from ``(seed, replicate, study, group)``, so any replicate can be
regenerated in isolation and results do not depend on scheduling order.

Coordinate conventions used by :mod:`divemeta.sim`:

* ``study = 0`` is reserved for replicate-level draws (size allocation);
  study ``i`` (0-based) uses ``study = i + 1``;
* ``group`` 0 and 1 are the two arms; ``group = 2`` is the study's random
  effect.
"""

import numpy as np

REPLICATE_LEVEL = 0
RANDOM_EFFECT = 2


def stream(seed: int, replicate: int, study: int, group: int) -> np.random.Generator:
    if min(seed, replicate, study, group) < 0:
        raise ValueError("stream coordinates must be nonnegative")
    words = []
    for v in (seed, replicate, study, group):
        v = int(v)
        if v >= 1 << 64:
            raise ValueError("stream coordinates must fit in 64 bits")
        # fixed two-word encoding per coordinate keeps keys unambiguous
        words += [v & 0xFFFFFFFF, v >> 32]
    ss = np.random.SeedSequence(np.array(words, dtype=np.uint32))
    return np.random.Generator(np.random.Philox(ss))
