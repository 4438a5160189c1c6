# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Exact ground truth by enumerating every sample of a small population.

S_n is evaluated once per n-subset and stored at the subset's
colexicographic rank; the difference operators then look their terms up in
that table. Subsets are visited in a fixed order and chunk totals are combined
with compensated summation, so results are bit-stable.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np
from scipy.special import ndtr

from . import ENUMERATION_GUARD
from .errors import DomainError, ResourceGuardError
from .lstat import check_sample_size, expected_l, g1_table
from .population import Population
from .weights import WeightScheme

logger = logging.getLogger(__name__)

CHUNK_SIZE = 2**15


@dataclass(frozen=True)
class ExactDistribution:
    """Atoms (S value, probability) of S_n, sorted by value, with equal values
    merged."""

    atoms: Tuple[Tuple[float, Fraction], ...]
    var_s: float
    expected_l: float

    def cdf(self, x):
        """P{S_n <= x} as an exact fraction."""
        return sum((prob for s, prob in self.atoms if s <= x), Fraction(0))

    def ks_distance(self):
        """sup_x |P{S_n <= x sigma} - Phi(x)| with sigma^2 = var_s."""
        if not self.var_s > 0:
            raise DomainError("a degenerate distribution cannot be standardised")
        sigma = math.sqrt(self.var_s)
        below = Fraction(0)
        worst = 0.0
        for s, prob in self.atoms:
            phi = float(ndtr(s / sigma))
            above = below + prob
            worst = max(worst, abs(float(below) - phi), abs(float(above) - phi))
            below = above
        return worst


def _guard(count, what):
    if count > ENUMERATION_GUARD:
        raise ResourceGuardError(
            f"{what} needs {count} evaluations, more than the limit of {ENUMERATION_GUARD}"
        )
    logger.debug(f"{what}: enumerating {count} evaluations")


def _combination_chunks(N, k):
    """0-based index arrays of shape (m, k) for all k-subsets, in
    lexicographic order."""
    combos = itertools.combinations(range(N), k)
    while True:
        chunk = list(itertools.islice(combos, CHUNK_SIZE))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64).reshape(len(chunk), k)


def _rank_table(N, k):
    # C(i, r) at element i and position r = 1..k, the colexicographic rank
    # weights. Position r only ever holds i in [r - 1, N - k + r - 1], where
    # C(i, r) < C(N, k); every other entry stays 0.
    table = np.zeros((N, k), dtype=np.int64)
    for r in range(1, k + 1):
        for i in range(r - 1, N - k + r):
            table[i, r - 1] = math.comb(i, r)
    return table


def _ranks(subsets, table):
    k = subsets.shape[1]
    return table[subsets, np.arange(k)].sum(axis=1)


class _Subsets:
    """S_n for all n-subsets of ``p``."""

    def __init__(self, p: Population, w: WeightScheme, n, what="subset table"):
        self.p, self.w, self.n = p, w, n
        self.count = math.comb(p.N, n)
        _guard(self.count, what)
        self.expected = expected_l(p, w, n)
        self.table = _rank_table(p.N, n)

    def s_values(self, subsets):
        # increasing indices on a sorted population are already order statistics
        x0 = self.p.values[0]
        values = self.p.values[subsets]
        L = (x0 * math.fsum(self.w.c) + (values - x0) @ self.w.c) / self.n
        return math.sqrt(self.n) * (L - self.expected)

    def lookup(self, s_table, subsets):
        return s_table[_ranks(subsets, self.table)]


def subset_s_table(p: Population, w: WeightScheme, n):
    """Array holding S_n of every n-subset at its colexicographic rank."""
    n = check_sample_size(p, w, n)
    subsets = _Subsets(p, w, n)
    s_table = np.empty(subsets.count)
    for chunk in _combination_chunks(p.N, n):
        s_table[_ranks(chunk, subsets.table)] = subsets.s_values(chunk)
    return s_table


def enumerate_distribution(p: Population, w: WeightScheme, n):
    """Exact law of S_n with E L_n taken as the enumeration mean of L_n."""
    n = check_sample_size(p, w, n)
    s_table = subset_s_table(p, w, n)
    count = len(s_table)
    mean_s = math.fsum(s_table) / count
    var_s = math.fsum((s_table - mean_s) ** 2) / count
    expected = expected_l(p, w, n) + mean_s / math.sqrt(n)

    values, counts = np.unique(s_table, return_counts=True)
    atoms = tuple(
        (float(s), Fraction(int(c), count)) for s, c in zip(values, counts)
    )
    return ExactDistribution(atoms, var_s, expected)


def exact_linear_moments(p: Population, w: WeightScheme, n):
    """Return (E U_1, Cov(U_1, R_1), E R_1^2) over all samples."""
    n = check_sample_size(p, w, n)
    subsets = _Subsets(p, w, n, "linear moments")
    g1 = g1_table(p, w, n).g1
    U, R = [], []
    for chunk in _combination_chunks(p.N, n):
        s = subsets.s_values(chunk)
        u = g1[chunk].sum(axis=1)
        U.append(u)
        R.append(s - u)
    U, R = np.concatenate(U), np.concatenate(R)
    count = subsets.count
    mean_u = math.fsum(U) / count
    mean_r = math.fsum(R) / count
    cov = math.fsum((U - mean_u) * (R - mean_r)) / count
    return mean_u, cov, math.fsum(R**2) / count


def _ordered_tuples(m, k):
    return np.array(list(itertools.permutations(range(m), k)), dtype=np.int64)


def _drop_tables(m):
    """For each position u < v of an m-subset, the remaining positions."""
    pairs = list(itertools.combinations(range(m), 2))
    keep = np.array(
        [[q for q in range(m) if q not in pair] for pair in pairs], dtype=np.int64
    ).reshape(len(pairs), m - 2)
    return pairs, keep


def exact_d1_moment(p: Population, w: WeightScheme, n):
    """E (D_1 S_n)^2 over all (n+1)-subsets and ordered choices of the two
    designated units."""
    n = check_sample_size(p, w, n)
    m = n + 1
    _guard(math.comb(p.N, m) * m * (m - 1), "D1 moment")
    subsets = _Subsets(p, w, n)
    s_table = subset_s_table(p, w, n)
    keep = np.array([[q for q in range(m) if q != u] for u in range(m)], dtype=np.int64)
    first, last = _ordered_tuples(m, 2).T

    sums = []
    for chunk in _combination_chunks(p.N, m):
        # S without the unit at each position, shape (chunk, m)
        without = np.stack(
            [subsets.lookup(s_table, chunk[:, keep[u]]) for u in range(m)], axis=1
        )
        # S(without last) - S(without first)
        d1 = without[:, last] - without[:, first]
        sums.append(math.fsum((d1**2).ravel()))
    return math.fsum(sums) / (math.comb(p.N, m) * m * (m - 1))


def exact_delta2(p: Population, w: WeightScheme, n):
    """delta_2 = E (n_* D_2 S_n)^2 with n_* = min(n, N - n), averaged over all
    (n+2)-subsets and all ordered choices of the four designated units."""
    n = check_sample_size(p, w, n)
    if n < 2 or n + 2 > p.N:
        raise DomainError(f"delta2 requires 2 <= n and n + 2 <= N, got n = {n}, N = {p.N}")
    m = n + 2
    tuples = m * (m - 1) * (m - 2) * (m - 3)
    total = math.comb(p.N, m) * tuples
    _guard(total, "delta2")
    subsets = _Subsets(p, w, n)
    s_table = subset_s_table(p, w, n)
    pairs, keep = _drop_tables(m)
    n_star = min(n, p.N - n)
    a, b, c, d = _ordered_tuples(m, 4).T

    sums = []
    for chunk in _combination_chunks(p.N, m):
        # P[:, u, v] = S of the subset without positions u and v
        P = np.zeros((len(chunk), m, m))
        for (u, v), kept in zip(pairs, keep):
            P[:, u, v] = P[:, v, u] = subsets.lookup(s_table, chunk[:, kept])
        d2 = (P[:, a, b] + P[:, c, d]) - (P[:, b, c] + P[:, a, d])
        sums.append(math.fsum(((n_star * d2) ** 2).ravel()))
    return math.fsum(sums) / total
