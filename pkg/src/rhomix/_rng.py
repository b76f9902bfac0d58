"""Seeded, counter-based random streams.

Every stream is ``Philox`` keyed by a ``SeedSequence`` built from the user
seed plus optional stream labels, so ``(seed, replicate)`` pairs are
independent and reproducible. Normals come from numpy's ziggurat sampler.
"""
import numbers

import numpy as np

from .errors import OutOfRange


def _parts(seed):
    if isinstance(seed, (tuple, list)):
        out = []
        for s in seed:
            out.extend(_parts(s))
        return out
    if not isinstance(seed, numbers.Integral) or seed < 0 or seed >= 2**64:
        raise OutOfRange("seed must be an unsigned 64-bit integer, got %r" % (seed,))
    return [int(seed)]


def make_rng(seed, *stream):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(_parts((seed,) + stream))))
