# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Seeded simple random sampling without replacement and the difference
operators D_1 S_n and D_2 S_n on extended samples.

A draw is determined by an :class:`RngSpec`: the generator behind it is NumPy's
PCG64 seeded with ``SeedSequence(seed, spawn_key=(stream,))``. Replicate ``r``
of a Monte Carlo run always uses stream ``r``, so results do not depend on how
replicates are split between workers.
"""

import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .combinatorics import _as_int
from .errors import DomainError
from .lstat import check_indices, check_sample_size, l_statistic
from .population import Population
from .weights import WeightScheme

logger = logging.getLogger(__name__)

MAX_U64 = 2**64


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            value = getattr(self, name)
            if not 0 <= value < MAX_U64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def at(self, stream):
        return RngSpec(self.seed, stream)


@dataclass(frozen=True, eq=False)
class SampleDraw:
    """1-based population indices in draw order."""

    indices: np.ndarray
    n: int


def rng_for(spec: RngSpec):
    seq = np.random.SeedSequence(spec.seed, spawn_key=(spec.stream,))
    return np.random.Generator(np.random.PCG64(seq))


def _generator(rng):
    return rng_for(rng) if isinstance(rng, RngSpec) else rng


def _partial_shuffle(gen, N, k):
    # Fisher-Yates stopped after k swaps; the first k slots are a uniformly
    # random ordered k-tuple of distinct indices.
    pool = list(range(1, N + 1))
    draws = gen.integers(np.arange(k), N).tolist()
    for i, j in enumerate(draws):
        pool[i], pool[j] = pool[j], pool[i]
    return np.array(pool[:k], dtype=np.int64)


def srswor(N, n, rng):
    """Draw n of the N population units without replacement.

    ``rng`` is an :class:`RngSpec` or an already constructed generator."""
    N, n = _as_int("N", N), _as_int("n", n)
    if not 1 <= n < N:
        raise DomainError(f"srswor requires 1 <= n < N, got n = {n}, N = {N}")
    return SampleDraw(_partial_shuffle(_generator(rng), N, n), n)


def draw_extended(N, size, rng):
    """Draw ``size`` distinct indices in random order. Position in the result
    is the designated position used by the difference operators."""
    N, size = _as_int("N", N), _as_int("size", size)
    if not 1 <= size <= N:
        raise DomainError(f"cannot draw {size} distinct units from N = {N}")
    return _partial_shuffle(_generator(rng), N, size)


def _subsample_l(p, w, indices):
    return l_statistic(w, p.values[indices - 1])


def d1_difference(p: Population, w: WeightScheme, n, extended_indices):
    """D_1 S_n = S_n(without X_{n+1}) - S_n(without X_1)."""
    n = check_sample_size(p, w, n)
    ext = check_indices(p.N, extended_indices, size=n + 1)
    # E L_n cancels between the two terms
    return math.sqrt(n) * (_subsample_l(p, w, ext[:-1]) - _subsample_l(p, w, ext[1:]))


def d2_difference(p: Population, w: WeightScheme, n, extended_indices):
    """Second difference of S_n over an (n+2)-sample with designated positions
    1, 2, n+1 and n+2:

        S_n(without X_{n+1}, X_{n+2}) - S_n(without X_1, X_{n+2})
            - S_n(without X_2, X_{n+1}) + S_n(without X_1, X_2)
    """
    n = check_sample_size(p, w, n)
    if n < 2 or n + 2 > p.N:
        raise DomainError(f"D2 requires 2 <= n and n + 2 <= N, got n = {n}, N = {p.N}")
    ext = check_indices(p.N, extended_indices, size=n + 2)
    a, b, c, d = ext[0], ext[1], ext[n], ext[n + 1]
    core = ext[2:n]

    def L(*kept):
        return _subsample_l(p, w, np.concatenate([core, np.array(kept, dtype=np.int64)]))

    # grouped so that exchanging {a, b} with {c, d} gives the identical float
    plus = L(a, b) + L(c, d)
    minus = L(b, c) + L(a, d)
    return math.sqrt(n) * (plus - minus)


def replicate_streams(reps, chunks) -> List[range]:
    """Split streams 0..reps-1 into at most ``chunks`` contiguous ranges."""
    reps, chunks = _as_int("reps", reps), max(1, _as_int("chunks", chunks))
    bounds = np.linspace(0, reps, min(chunks, max(reps, 1)) + 1).astype(int)
    return [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
