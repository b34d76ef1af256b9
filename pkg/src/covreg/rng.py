"""Seeded random streams.

Uniform doubles come from numpy's PCG64 bit generator (``Generator.random``,
53 random bits per value). Gaussian variates are produced from those
uniforms with the Box-Muller transform, in pairs::

    r = sqrt(-2 log(1 - u1));  z1 = r cos(2 pi u2);  z2 = r sin(2 pi u2)

Anything able to reproduce the PCG64 stream for a given ``SeedSequence`` can
therefore reproduce every simulated series bit-for-bit, up to the last-ulp
behaviour of the platform's ``log``, ``cos`` and ``sin``.

Replication ``i`` of a Monte Carlo study with seed ``s`` uses the stream
seeded by the entropy pair ``(s, i)``, so the draws do not depend on the
order in which replications run.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np


def stream(seed: int | Sequence[int]) -> np.random.Generator:
    """Independent generator for ``seed`` (an int or a tuple of ints)."""
    entropy = [int(seed)] if np.isscalar(seed) else [int(s) for s in seed]
    if any(s < 0 for s in entropy):
        raise ValueError("seeds must be non-negative integers")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def standard_normal(gen: np.random.Generator, size) -> np.ndarray:
    """Standard normal draws by Box-Muller from ``gen.random``."""
    shape = (size,) if np.isscalar(size) else tuple(size)
    count = int(np.prod(shape))
    pairs = (count + 1) // 2
    u = gen.random(2 * pairs)
    r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:count].reshape(shape)
