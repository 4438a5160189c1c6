# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.


import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DomainError
from .util.readers import read_values

logger = logging.getLogger(__name__)

DEFAULT_DELTAS = (0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0)
PAIRWISE_LIMIT = 4000


def check_delta(delta):
    if not 0.5 < delta <= 1:
        raise DomainError(f"delta must lie in (1/2, 1], got {delta}")
    return float(delta)


@dataclass(frozen=True, eq=False)
class Population:
    """A finite population x_1 <= ... <= x_N of study values.

    Instances should be created with :func:`make_population`, which sorts the
    input. The ``values`` array is read-only.
    """

    values: np.ndarray

    @property
    def N(self):
        return len(self.values)

    @property
    def gaps(self):
        """Adjacent spacings x_{i+1} - x_i, for i = 1..N-1."""
        return np.diff(self.values)

    @property
    def is_constant(self):
        return self.values[0] == self.values[-1]

    def __len__(self):
        return self.N

    def __repr__(self):
        return f"Population(N={self.N}, range=[{self.values[0]!r}, {self.values[-1]!r}])"


@dataclass(frozen=True)
class SmoothnessProfile:
    """Smallest constant C with |x_m - x_l| <= C N^-delta |m - l| for all pairs."""

    delta: float
    c_min: float
    max_gap: float


def make_population(raw_values):
    values = np.array(raw_values, dtype=np.float64).ravel()
    if values.size < 2:
        raise DomainError(f"a population needs at least 2 values, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise DomainError("population values must be finite")
    values = np.sort(values, kind="stable")
    values.setflags(write=False)
    return Population(values)


def load_population(path):
    logger.debug(f"loading population from `{path}`")
    return make_population(read_values(path))


def pop_mean(p: Population):
    # shifting by x_1 keeps the mean of a constant population exact
    x0 = p.values[0]
    return float(x0 + math.fsum(p.values - x0) / p.N)


def pop_variance(p: Population):
    """Variance with the N divisor, i.e. Var X_1 for a uniform draw."""
    mean = pop_mean(p)
    return math.fsum((x - mean) ** 2 for x in p.values) / p.N


def pairwise_variance(p: Population):
    """Var X_1 as N^-2 times the sum of (x_m - x_l)^2 over l < m."""
    x = p.values
    if p.N > PAIRWISE_LIMIT:
        # the pair sum equals N * sum (x - mean)^2
        return pop_variance(p)
    total = math.fsum(math.fsum((x[m] - x[:m]) ** 2) for m in range(1, p.N))
    return total / p.N**2


def second_moment(p: Population):
    """E X_1^2."""
    return math.fsum(p.values**2) / p.N


def smoothness_profile(p: Population, delta):
    delta = check_delta(delta)
    max_gap = float(p.gaps.max())
    return SmoothnessProfile(delta, p.N**delta * max_gap, max_gap)


def smoothness_profile_bruteforce(p: Population, delta):
    """O(N^2) evaluation of the smallest C over all index pairs."""
    delta = check_delta(delta)
    x = p.values
    best = 0.0
    for l in range(p.N):
        for m in range(l + 1, p.N):
            best = max(best, (x[m] - x[l]) / (m - l))
    return SmoothnessProfile(delta, p.N**delta * best, float(p.gaps.max()))


def smoothness_profiles(p: Population, deltas: Sequence[float] = DEFAULT_DELTAS):
    return tuple(smoothness_profile(p, d) for d in deltas)


def range_check_nair_thomson(p: Population) -> Tuple[float, float]:
    """Return the range x_N - x_1 and its upper bound sigma * sqrt(2N)."""
    spread = float(p.values[-1] - p.values[0])
    bound = math.sqrt(pop_variance(p)) * math.sqrt(2 * p.N)
    if spread > bound + 1e-12 * max(1.0, bound):
        logger.warning(f"population range {spread} exceeds sigma*sqrt(2N) = {bound}")
    return spread, bound
