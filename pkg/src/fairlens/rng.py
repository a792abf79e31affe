"""Seeded randomness shared by every randomized operation.

One named, portable generator: the PCG64 bit generator seeded with a 64-bit
unsigned integer. Shuffles use the Fisher-Yates procedure (numpy's
``permutation``/``permuted``). Both identifiers are echoed into report
configs so published p-values and samples can be reproduced.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

RNG_ALGORITHM = "pcg64"
SHUFFLE_PROCEDURE = "fisher-yates"

__all__ = ["RNG_ALGORITHM", "SHUFFLE_PROCEDURE", "generator"]


def generator(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; *seed* must fit in an unsigned 64-bit word."""
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ValidationError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return np.random.Generator(np.random.PCG64(seed))
