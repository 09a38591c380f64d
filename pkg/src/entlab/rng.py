"""Seeded random streams.

Every sampler takes an explicit :class:`numpy.random.Generator`. Parallel
work derives independent sub-streams from a master seed with
:func:`substream`, which is counter based: sub-stream ``k`` of seed ``s``
is always the same stream no matter how many workers run or in which order.
"""

import numpy as np

#: Version of the master-seed -> sub-stream derivation. Bump on any change.
SUBSTREAM_VERSION = 1

#: Bit generator and normal-variate method, recorded in result metadata.
GENERATOR_INFO = {
    "bit_generator": "PCG64",
    "normal_method": "ziggurat (numpy Generator.standard_normal)",
    "substream_derivation": f"SeedSequence(seed mod 2**64, spawn_key=(k,)) v{SUBSTREAM_VERSION}",
}

_MASK64 = (1 << 64) - 1


def _entropy(seed):
    return int(seed) & _MASK64


def as_generator(rng=None):
    """Return a Generator; ints are treated as seeds, None draws fresh entropy."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.default_rng()
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(_entropy(rng))))


def substream(seed, k):
    """Generator for the ``k``-th sub-stream of master ``seed`` (any 64-bit int)."""
    ss = np.random.SeedSequence(_entropy(seed), spawn_key=(int(k),))
    return np.random.Generator(np.random.PCG64(ss))


def seed_from(rng):
    """Draw a 63-bit seed from ``rng``; used to hand work to sub-streams."""
    return int(as_generator(rng).integers(0, 2**63 - 1))


def complex_normal(rng, size):
    """I.i.d. standard complex Gaussians, E|z|^2 = 1."""
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return z * np.sqrt(0.5)
