'''Deterministic splittable random streams.

Every stochastic routine in the library draws from a stream derived from a
64-bit master seed plus a structured key (level index, replicate index, ...).
A stream depends only on (master_seed, key), never on execution order or
worker count, so replicated experiments reduce to the same bits no matter
how they are scheduled.
'''

from __future__ import annotations

from typing import Iterable
from zlib import crc32

import numpy as np


def _key_part(k) -> int:
    # string labels hash stably (crc32 is fixed by the zlib spec)
    if isinstance(k, str):
        return crc32(k.encode('utf-8'))
    return int(k)


def stream(master_seed: int, *key) -> np.random.Generator:
    '''Return the PCG64 generator identified by (master_seed, key).

    Args:
        master_seed: nonnegative integer seed for the whole experiment.
        key: path components, e.g. (level_index, replicate_index). Integers
            are used as-is; strings are folded to stable 32-bit labels.

    Returns:
        A fresh, independently seeded numpy Generator. Calling this twice
        with the same arguments yields bit-identical streams.
    '''
    if master_seed < 0:
        raise ValueError('master_seed must be nonnegative')
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=tuple(_key_part(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def seed_record(master_seed: int, *key) -> str:
    '''Compact textual identifier of a stream, for provenance columns.'''
    parts = [str(int(master_seed))] + [str(_key_part(k)) for k in key]
    return ':'.join(parts)


def substreams(master_seed: int, prefix: Iterable, count: int) -> list[np.random.Generator]:
    '''Streams (master_seed, *prefix, i) for i in range(count).'''
    pre = tuple(prefix)
    return [stream(master_seed, *pre, i) for i in range(count)]
