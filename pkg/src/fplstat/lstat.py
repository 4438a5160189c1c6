# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
The L-statistic L_n = (1/n) sum c_j X_{j:n}, its normalised form
S_n = sqrt(n) (L_n - E L_n), and the linear part of its Hoeffding
decomposition, S_n = U_1 + R_1 with U_1 = sum g_1(X_i).

Population and sample indices are 1-based throughout, matching x_1..x_N.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import EXACT_THRESHOLD
from .combinatorics import _as_int, binomial_table, log_binom, log_binom_array
from .errors import DomainError
from .population import Population
from .weights import WeightScheme

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HoeffdingDecomposition:
    """g_1(x_k) for k = 1..N, with sigma1_sq = (1/N) sum g_1(x_k)^2."""

    g1: np.ndarray
    sigma1_sq: float
    n: int
    expected_L: float


@dataclass(frozen=True)
class SampleEvaluation:
    L: float
    S: float
    U1: Optional[float] = None
    R1: Optional[float] = None


def check_sample_size(p: Population, w: WeightScheme, n):
    n = _as_int("n", n)
    if not 1 <= n < p.N:
        raise DomainError(f"sample size must satisfy 1 <= n < N, got n = {n}, N = {p.N}")
    if w.n != n:
        raise DomainError(f"weights were built for n = {w.n}, not n = {n}")
    return n


def _shifted_sum(c, values, shift):
    # L and E L both carry the shift term x0 * sum(c) / n; it cancels exactly
    # in S, so a constant population yields S = 0 without rounding.
    return shift * math.fsum(c) + math.fsum(c * (values - shift))


def l_statistic_from_sorted(w: WeightScheme, sorted_values):
    sorted_values = np.asarray(sorted_values, dtype=np.float64)
    if len(sorted_values) != w.n:
        raise DomainError(f"sample holds {len(sorted_values)} values, weights expect {w.n}")
    return _shifted_sum(w.c, sorted_values, sorted_values[0]) / w.n


def l_statistic(w: WeightScheme, sample_values):
    """(1/n) sum_j c_j X_{j:n} for the sorted sample X_{1:n} <= ... <= X_{n:n}."""
    return l_statistic_from_sorted(w, np.sort(np.asarray(sample_values, dtype=np.float64)))


def order_index_matrix(N, n, columns):
    """Matrix whose column ``r`` is the law of the population index of order
    statistic ``columns[r]`` (1-based) of a size-n sample; rows are i = 1..N."""
    columns = np.asarray(columns, dtype=np.int64)
    if N <= EXACT_THRESHOLD:
        C = binomial_table(N)
        total = C(N, n)
        return np.array(
            [
                [C(i - 1, j - 1) * C(N - i, n - j) / total for j in columns]
                for i in range(1, N + 1)
            ]
        ).reshape(N, len(columns))
    i = np.arange(1, N + 1)[:, None]
    logp = log_binom_array(i - 1, columns - 1) + log_binom_array(N - i, n - columns)
    return np.exp(logp - log_binom(N, n))


def expected_l(p: Population, w: WeightScheme, n):
    """E L_n = (1/n) sum_j c_j sum_i x_i P(X_{j:n} = x_i), from the exact law
    of the order statistic indices."""
    n = check_sample_size(p, w, n)
    x0 = p.values[0]
    (nonzero,) = np.nonzero(w.c)
    if nonzero.size == 0:
        return 0.0
    pmf = order_index_matrix(p.N, n, nonzero + 1)
    # E (X_{j:n} - x_1) for every retained j
    shifted = pmf.T @ (p.values - x0)
    c = w.c[nonzero]
    return (x0 * math.fsum(c) + math.fsum(c * shifted)) / n


def s_statistic(p: Population, w: WeightScheme, n, sample_values, expected=None):
    """S_n = sqrt(n) (L_n - E L_n)."""
    n = check_sample_size(p, w, n)
    if expected is None:
        expected = expected_l(p, w, n)
    L = l_statistic(w, sample_values)
    return SampleEvaluation(L=L, S=math.sqrt(n) * (L - expected))


def _hypergeometric_coefficients(p: Population, w: WeightScheme, n):
    # A_i = sum_j c_j C(i-1, j-1) C(N-i-1, n-j) / C(N-2, n-1), i = 1..N-1
    N = p.N
    A = np.zeros(N - 1)
    (nonzero,) = np.nonzero(w.c)
    if N <= EXACT_THRESHOLD:
        C = binomial_table(N)
        total = C(N - 2, n - 1)
        for j in nonzero + 1:
            A += w.c[j - 1] * np.array(
                [C(i - 1, j - 1) * C(N - i - 1, n - j) / total for i in range(1, N)]
            )
        return A
    i = np.arange(1, N)
    log_total = log_binom(N - 2, n - 1)
    for j in nonzero + 1:
        logr = log_binom_array(i - 1, j - 1) + log_binom_array(N - i - 1, n - j)
        A += w.c[j - 1] * np.exp(logr - log_total)
    return A


def g1_table(p: Population, w: WeightScheme, n):
    """Tabulate the Hoeffding projection

        g_1(x_k) = -n^-1/2 sum_i (1{i >= k} - i/N) A_i (x_{i+1} - x_i)

    with one suffix-sum pass, O(N n) in total."""
    n = check_sample_size(p, w, n)
    N = p.N
    logger.debug(f"building g1 table for N = {N}, n = {n}, weights `{w.source}`")
    weighted = _hypergeometric_coefficients(p, w, n) * p.gaps
    suffix = np.zeros(N)
    suffix[: N - 1] = np.cumsum(weighted[::-1])[::-1]
    W = math.fsum(np.arange(1, N) * weighted)
    g1 = -(suffix - W / N) / math.sqrt(n)
    g1.setflags(write=False)
    return HoeffdingDecomposition(
        g1=g1,
        sigma1_sq=math.fsum(g1**2) / N,
        n=n,
        expected_L=expected_l(p, w, n),
    )


def g1_table_naive(p: Population, w: WeightScheme, n):
    """Direct O(N^2 n) evaluation of g_1, kept as a cross-check."""
    n = check_sample_size(p, w, n)
    N = p.N
    total = math.comb(N - 2, n - 1)
    gaps = p.gaps
    g1 = np.zeros(N)
    for k in range(1, N + 1):
        terms = []
        for j in range(1, n + 1):
            for i in range(1, N):
                ratio = math.comb(i - 1, j - 1) * math.comb(N - i - 1, n - j) / total
                terms.append(w.c[j - 1] * ((i >= k) - i / N) * ratio * gaps[i - 1])
        g1[k - 1] = -math.fsum(terms) / math.sqrt(n)
    return g1


def check_indices(N, indices, size=None):
    """Validate 1-based distinct population indices and return them as an
    integer array."""
    indices = np.asarray(indices, dtype=np.int64).ravel()
    if size is not None and len(indices) != size:
        raise DomainError(f"expected {size} indices, got {len(indices)}")
    if indices.size and (indices.min() < 1 or indices.max() > N):
        raise DomainError(f"indices must lie in 1..{N}")
    if len(np.unique(indices)) != len(indices):
        raise DomainError("sample indices must be distinct")
    return indices


def evaluate_sample(p: Population, w: WeightScheme, n, decomposition, sample_indices):
    """L, S, U_1 = sum g_1(X_i) and R_1 = S - U_1 for the sample at the given
    1-based population indices."""
    n = check_sample_size(p, w, n)
    idx = check_indices(p.N, sample_indices, size=n)
    ev = s_statistic(p, w, n, p.values[idx - 1], expected=decomposition.expected_L)
    U1 = math.fsum(decomposition.g1[idx - 1])
    return SampleEvaluation(L=ev.L, S=ev.S, U1=U1, R1=ev.S - U1)


def spacing_sq_moment(p: Population, n, pos):
    """Exact E (X_{pos+1:n+2} - X_{pos:n+2})^2 under sampling without
    replacement of n + 2 units."""
    N, n, pos = p.N, _as_int("n", n), _as_int("pos", pos)
    if not (1 <= pos <= n + 1 and n + 2 <= N):
        raise DomainError(
            f"spacing_sq_moment requires 1 <= pos <= n+1 and n+2 <= N, got {pos}, {n}, {N}"
        )
    x = p.values
    terms = []
    if N <= EXACT_THRESHOLD:
        C = binomial_table(N)
        total = C(N, n + 2)
        for l in range(1, N):
            left = C(l - 1, pos - 1)
            if not left:
                continue
            for m in range(l + 1, N + 1):
                weight = left * C(N - m, n + 1 - pos) / total
                terms.append(weight * (x[m - 1] - x[l - 1]) ** 2)
        return math.fsum(terms)
    log_total = log_binom(N, n + 2)
    for l in range(pos, N):
        m = np.arange(l + 1, N + 1)
        logw = log_binom(l - 1, pos - 1) + log_binom_array(N - m, n + 1 - pos)
        terms.append(math.fsum(np.exp(logw - log_total) * (x[m - 1] - x[l - 1]) ** 2))
    return math.fsum(terms)


def spacing_sq_moment_bound(N, n, C, delta):
    """C^2 N^-2delta (N+1)(2N-n) / ((n+3)(n+4)), the bound on every spacing
    moment of an (n+2)-sample from a population with smoothness constant C."""
    return C**2 * N ** (-2 * delta) * (N + 1) * (2 * N - n) / ((n + 3) * (n + 4))


def g1_sup_bound(a, C, n, N, delta):
    """(a C / 2) n^-1/2 N^-delta (N - 1), a bound on max_k |g_1(x_k)| when
    |c_j| <= a and the population has smoothness constant C at delta."""
    return a * C / 2 / math.sqrt(n) * N ** (-delta) * (N - 1)
