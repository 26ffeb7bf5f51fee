"""Counter-based random streams for reproducible corruption.

Every noise draw comes from a named stream keyed by (seed, name), backed
by a counter-based bit generator, so adding or reordering consumers never
shifts anyone else's values and the same request yields the same numbers
on any platform. Normal deviates use the inverse CDF rather than
rejection sampling, which keeps the draw count deterministic.
"""

from __future__ import annotations

import hashlib

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

_INV_2_53 = 2.0 ** -53
_HALF_ULP = 2.0 ** -54


def _stream_key(seed: int, name: str) -> np.ndarray:
    digest = hashlib.blake2b(
        name.encode("utf-8"), digest_size=8, key=int(seed).to_bytes(8, "little")
    ).digest()
    return np.array(
        [int(seed) & (2**64 - 1), int.from_bytes(digest, "little")], dtype=np.uint64
    )


def raw_stream(seed: int, name: str, n: int, offset: int = 0) -> np.ndarray:
    """``n`` raw 64-bit words from the named stream, starting at ``offset``."""
    if n < 0 or offset < 0:
        raise ValueError("n and offset must be non-negative")
    gen = Philox(key=_stream_key(seed, name))
    # the counter advances in blocks of four 64-bit words
    if offset >= 4:
        gen.advance(offset // 4)
    skip = offset % 4
    return gen.random_raw(skip + n)[skip:]


def uniform_stream(seed: int, name: str, n: int, offset: int = 0) -> np.ndarray:
    """Uniforms in the open interval (0, 1), 53-bit resolution."""
    raw = raw_stream(seed, name, n, offset)
    return (raw >> np.uint64(11)) * _INV_2_53 + _HALF_ULP


def gaussian_stream(seed: int, name: str, n: int, offset: int = 0) -> np.ndarray:
    """Standard normal deviates via the inverse CDF."""
    return ndtri(uniform_stream(seed, name, n, offset))
