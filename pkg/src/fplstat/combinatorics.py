# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Binomial coefficients and the hypergeometric placement laws of order
statistics under simple random sampling without replacement.

Every law here is defined over population *indices* 1..N, so ties among
population values never need special handling. Two numeric paths exist:
populations with ``N <= EXACT_THRESHOLD`` use exact integer arithmetic, larger
ones are evaluated in log space. Functions taking ``exact=True`` return
:class:`fractions.Fraction` values for identity checks.
"""

import functools
import logging
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

import numpy as np
from scipy.special import gammaln

from . import EXACT_THRESHOLD
from .errors import DomainError

logger = logging.getLogger(__name__)

Probability = Union[float, Fraction]


def _as_int(name, value):
    try:
        value = operator.index(value)
    except TypeError:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise DomainError(f"{name} must be non-negative, got {value}")
    return value


@dataclass(frozen=True)
class BinomialTable:
    """Pascal triangle holding the exact value of C(a, b) for
    ``0 <= b <= a <= max_n``. Lookups with ``a < b`` return 0."""

    max_n: int
    rows: Tuple[Tuple[int, ...], ...]

    @classmethod
    def build(cls, max_n):
        max_n = _as_int("max_n", max_n)
        rows = [(1,)]
        for a in range(1, max_n + 1):
            prev = rows[-1]
            inner = tuple(prev[b - 1] + prev[b] for b in range(1, a))
            rows.append((1,) + inner + (1,))
        return cls(max_n, tuple(rows))

    def __call__(self, a, b):
        a, b = _as_int("a", a), _as_int("b", b)
        if b > a:
            return 0
        if a > self.max_n:
            raise DomainError(f"C({a}, {b}) is outside a table built for {self.max_n}")
        return self.rows[a][b]


@functools.lru_cache(maxsize=16)
def binomial_table(max_n):
    logger.debug(f"building binomial table up to {max_n}")
    return BinomialTable.build(max_n)


def binom(a, b):
    """Exact binomial coefficient, with C(a, b) = 0 for a < b."""
    a, b = _as_int("a", a), _as_int("b", b)
    return math.comb(a, b)


def log_binom(a, b):
    """Natural log of C(a, b); ``-inf`` encodes C(a, b) = 0."""
    a, b = _as_int("a", a), _as_int("b", b)
    if b > a:
        return -math.inf
    if a <= EXACT_THRESHOLD:
        return math.log(math.comb(a, b))
    return float(gammaln(a + 1) - gammaln(b + 1) - gammaln(a - b + 1))


def log_binom_array(a, b):
    """Vectorised :func:`log_binom` over broadcast integer arrays. Entries with
    ``b < 0`` or ``b > a`` map to ``-inf``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    valid = (b >= 0) & (b <= a)
    safe_a = np.where(valid, a, 0.0)
    safe_b = np.where(valid, b, 0.0)
    out = gammaln(safe_a + 1) - gammaln(safe_b + 1) - gammaln(safe_a - safe_b + 1)
    return np.where(valid, out, -np.inf)


def _comb_for(N):
    if N <= EXACT_THRESHOLD:
        return binomial_table(N)
    return math.comb


def _ratio(numerator, denominator, exact):
    if exact:
        return Fraction(numerator, denominator)
    return numerator / denominator


def order_index_pmf(N, n, j, exact=False):
    """Law of the population index of the j-th order statistic of a size-n
    sample: entry ``i - 1`` is C(i-1, j-1) C(N-i, n-j) / C(N, n)."""
    N, n, j = _as_int("N", N), _as_int("n", n), _as_int("j", j)
    if not 1 <= j <= n < N:
        raise DomainError(f"order_index_pmf requires 1 <= j <= n < N, got {j}, {n}, {N}")

    if exact or N <= EXACT_THRESHOLD:
        total = math.comb(N, n)
        values = [
            _ratio(math.comb(i - 1, j - 1) * math.comb(N - i, n - j), total, exact)
            for i in range(1, N + 1)
        ]
        return values if exact else np.array(values)

    i = np.arange(1, N + 1)
    logp = log_binom_array(i - 1, j - 1) + log_binom_array(N - i, n - j)
    return np.exp(logp - log_binom(N, n))


def rank_pair_prob_1(n, i, j, exact=False):
    """Probability that the designated pair of an (n+1)-extended sample holds
    ranks i < j."""
    n, i, j = _as_int("n", n), _as_int("i", i), _as_int("j", j)
    if not 1 <= i < j <= n + 1:
        raise DomainError(f"rank_pair_prob_1 requires 1 <= i < j <= n+1, got {i}, {j}")
    return _ratio(1, math.comb(n + 1, 2), exact)


def rank_pair_prob_2(n, i, j, exact=False):
    """Probability that the middle two of four designated ranks in an
    (n+2)-extended sample are i < j."""
    n, i, j = _as_int("n", n), _as_int("i", i), _as_int("j", j)
    if n < 2:
        raise DomainError(f"rank_pair_prob_2 requires n >= 2, got {n}")
    if not 1 <= i < j <= n + 2:
        raise DomainError(f"rank_pair_prob_2 requires 1 <= i < j <= n+2, got {i}, {j}")
    return _ratio((i - 1) * (n + 2 - j), math.comb(n + 2, 4), exact)


def placement_prob(N, n_plus, i, j, l, m, exact=False):
    """Probability that order statistics i < j of a size ``n_plus`` sample sit
    on population indices l < m."""
    N, n_plus = _as_int("N", N), _as_int("n_plus", n_plus)
    i, j, l, m = (_as_int(k, v) for k, v in (("i", i), ("j", j), ("l", l), ("m", m)))
    if not 1 <= i < j <= n_plus <= N:
        raise DomainError(
            f"placement_prob requires 1 <= i < j <= n_plus <= N, got {i}, {j}, {n_plus}, {N}"
        )
    if not 1 <= l < m <= N:
        raise DomainError(f"placement_prob requires 1 <= l < m <= N, got {l}, {m}")

    if exact or N <= EXACT_THRESHOLD:
        C = _comb_for(N)
        numerator = C(l - 1, i - 1) * C(m - l - 1, j - i - 1) * C(N - m, n_plus - j)
        return _ratio(numerator, C(N, n_plus), exact)

    logp = (
        log_binom(l - 1, i - 1)
        + log_binom(m - l - 1, j - i - 1)
        + log_binom(N - m, n_plus - j)
        - log_binom(N, n_plus)
    )
    return math.exp(logp)


def placement_total(N, n_plus, exact=False):
    """Closed form of the sum of :func:`placement_prob` over all i < j, which
    does not depend on (l, m): C(N-2, n_plus-2) / C(N, n_plus)."""
    N, n_plus = _as_int("N", N), _as_int("n_plus", n_plus)
    if not 2 <= n_plus <= N:
        raise DomainError(f"placement_total requires 2 <= n_plus <= N, got {n_plus}, {N}")
    return _ratio(math.comb(N - 2, n_plus - 2), math.comb(N, n_plus), exact)


def lambda2_weight(N, n, l, m):
    """Exact weight of (x_m - x_l)^2 in the Hoelder bound on the degeneracy
    quantity: the sum over i < j of p_{2;ij} * p_{2;ijlm}."""
    total = Fraction(0)
    for i in range(1, n + 2):
        for j in range(i + 1, n + 3):
            total += rank_pair_prob_2(n, i, j, exact=True) * placement_prob(
                N, n + 2, i, j, l, m, exact=True
            )
    return total


def spacing_weight_sum(N, n, pos):
    """Sum over l < m of (m-l)^2 C(l-1, pos-1) C(N-m, n+1-pos), the unweighted
    second moment of the pos-th spacing of an (n+2)-sample times C(N, n+2)."""
    N, n, pos = _as_int("N", N), _as_int("n", n), _as_int("pos", pos)
    if not (1 <= pos <= n + 1 and n + 2 <= N):
        raise DomainError(
            f"spacing_weight_sum requires 1 <= pos <= n+1 and n+2 <= N, got {pos}, {n}, {N}"
        )
    C = _comb_for(N)
    return sum(
        (m - l) ** 2 * C(l - 1, pos - 1) * C(N - m, n + 1 - pos)
        for l in range(1, N)
        for m in range(l + 1, N + 1)
    )


def spacing_closed_form(N, n):
    """C(N, n+2) (N+1)(2N-n) / ((n+3)(n+4)), the closed form of
    :func:`spacing_weight_sum` for every valid position."""
    N, n = _as_int("N", N), _as_int("n", n)
    if not 1 <= n <= N - 2:
        raise DomainError(f"spacing_closed_form requires 1 <= n <= N-2, got {n}, {N}")
    return Fraction(math.comb(N, n + 2) * (N + 1) * (2 * N - n), (n + 3) * (n + 4))
