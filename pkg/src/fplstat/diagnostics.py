# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Finite-scale values of the conditions and bounds behind the normal
approximation of S_n.

Nothing here decides whether a limit theorem "applies": asymptotic clauses
cannot be settled at a single (N, n), so reports carry the values and leave
trends across a population family to the caller.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from . import ENUMERATION_GUARD
from .combinatorics import _as_int
from .errors import DomainError
from .lstat import HoeffdingDecomposition, check_sample_size, g1_sup_bound, g1_table
from .oracle import enumerate_distribution, exact_d1_moment
from .population import (
    Population,
    check_delta,
    pop_mean,
    pop_variance,
    second_moment,
    smoothness_profile,
)
from .weights import (
    WeightKind,
    WeightScheme,
    trimmed_weights,
    trimming_bounds,
    weight_diagnostics,
)

logger = logging.getLogger(__name__)

DEFAULT_EPSILONS = (0.01, 0.05, 0.1, 0.5, 1.0)
DEFAULT_DELTAS = (0.55, 0.6, 0.75, 0.9, 1.0)


@dataclass(frozen=True)
class ConditionReport:
    er_classical: Dict[float, float]
    er_g1: Dict[float, float]
    lindeberg_g1: Dict[float, float]
    tau: float
    n_star: int
    sigma1_sq: float


@dataclass(frozen=True)
class BoundsReport:
    delta: float
    c_min: float
    var_upper_weights: float
    var_upper_d1: Optional[float]
    delta2_upper_holder: float
    delta2_upper_trimmed: Optional[float]
    theorem2_growth: float
    g1_sup_bound: float


@dataclass(frozen=True)
class TheoremOneReport:
    conditions: ConditionReport
    bounds: Tuple[BoundsReport, ...]
    holder_b: Dict[float, float]
    # B(delta) of the same scheme rebuilt at 2n, when that is possible
    holder_stable: Dict[float, Optional[float]]
    sup_bound_a: float
    second_moment: float
    sigma_tilde: Optional[float]
    sigma_source: Optional[str]
    # finite-scale instances of the assumptions; None where not computed
    flags: Dict[str, Union[bool, float, None]]


# relative slack when comparing B(delta) at n and 2n
HOLDER_RTOL = 1e-9

BOUND_FIELDS = (
    "c_min",
    "var_upper_weights",
    "var_upper_d1",
    "delta2_upper_holder",
    "delta2_upper_trimmed",
    "theorem2_growth",
    "g1_sup_bound",
)


def _epsilons(epsilons):
    epsilons = tuple(float(e) for e in epsilons)
    for e in epsilons:
        if not e > 0:
            raise DomainError(f"epsilon must be positive, got {e}")
    return epsilons


def tau(N, n):
    """tau = sqrt(N p q) with p = n / N."""
    p = n / N
    return math.sqrt(N * p * (1 - p))


def n_star(N, n):
    return min(n, N - n)


def erdos_renyi_classical(p: Population, n, epsilons=DEFAULT_EPSILONS):
    """sigma^-2 E (X_1 - mu)^2 1{|X_1 - mu| > eps tau sigma} for each eps."""
    var = pop_variance(p)
    if p.is_constant or not var > 0:
        raise DomainError("the Erdos-Renyi condition needs a non-constant population")
    sigma = math.sqrt(var)
    dev = p.values - pop_mean(p)
    t = tau(p.N, n)
    return {
        e: math.fsum(dev[np.abs(dev) > e * t * sigma] ** 2) / p.N / var
        for e in _epsilons(epsilons)
    }


def erdos_renyi_g1(decomposition: HoeffdingDecomposition, N, n, epsilons=DEFAULT_EPSILONS):
    """sigma_1^-2 E g_1^2(X_1) 1{|g_1(X_1)| > eps tau sigma_1} for each eps."""
    s1 = decomposition.sigma1_sq
    if not s1 > 0:
        raise DomainError("sigma_1 is zero, the g1 form of the condition is undefined")
    g = decomposition.g1
    threshold = tau(N, n) * math.sqrt(s1)
    return {
        e: math.fsum(g[np.abs(g) > e * threshold] ** 2) / N / s1
        for e in _epsilons(epsilons)
    }


def lindeberg_g1(decomposition: HoeffdingDecomposition, N, n, epsilons=DEFAULT_EPSILONS):
    """n_* E g_1^2(X_1) 1{g_1^2(X_1) > eps} for each eps."""
    g = decomposition.g1
    sq = g**2
    return {
        e: n_star(N, n) * math.fsum(sq[sq > e]) / N for e in _epsilons(epsilons)
    }


def condition_report(p: Population, w: WeightScheme, n, epsilons=DEFAULT_EPSILONS, decomposition=None):
    n = check_sample_size(p, w, n)
    if decomposition is None:
        decomposition = g1_table(p, w, n)
    return ConditionReport(
        er_classical=erdos_renyi_classical(p, n, epsilons),
        er_g1=erdos_renyi_g1(decomposition, p.N, n, epsilons),
        lindeberg_g1=lindeberg_g1(decomposition, p.N, n, epsilons),
        tau=tau(p.N, n),
        n_star=n_star(p.N, n),
        sigma1_sq=decomposition.sigma1_sq,
    )


def theorem2_growth(N, n, delta):
    """(1 - n/N)^-1 n^1/2 N^(delta - 1)."""
    return math.sqrt(n) * N ** (check_delta(delta) - 1) / (1 - n / N)


def variance_upper_weights(N, n, a, var):
    """a^2 (N - n) / (N - 1) Var X_1, with a = max |c_j|."""
    return a**2 * (N - n) / (N - 1) * var


def variance_upper_d1(N, n, d1_moment):
    """1/2 n (1 - n/N) E (D_1 S_n)^2."""
    return 0.5 * n * (1 - n / N) * d1_moment


def delta2_upper_holder(n, B, delta, var):
    """24 B^2 n^(1 - 2 delta) Var X_1."""
    return 24 * B**2 * n ** (1 - 2 * delta) * var


def delta2_upper_trimmed(N, n, t1, t2, C, delta):
    """Bound on delta_2 for the (t1, t2) trimmed mean of a population with
    smoothness constant C at ``delta``:

        C_1 n_*^2 n^-1 C(n+2, 4)^-1 C^2 N^-2delta (N+1)(2N-n) / ((n+3)(n+4))
            * [(n+2)^4 / 64 + (n+1)^4 / 32]

    with C_1 = (t2 - t1 - 1/n)^-2.
    """
    trimming_bounds(t1, t2, n)
    if n < 2 or n + 2 > N:
        raise DomainError(f"delta2 requires 2 <= n and n + 2 <= N, got n = {n}, N = {N}")
    C1 = (t2 - t1 - 1 / n) ** -2
    spacing = C**2 * N ** (-2 * delta) * (N + 1) * (2 * N - n) / ((n + 3) * (n + 4))
    bracket = (n + 2) ** 4 / 64 + (n + 1) ** 4 / 32
    return C1 * n_star(N, n) ** 2 / n / math.comb(n + 2, 4) * spacing * bracket


def _bounds(p, w, n, delta, var, d1_moment):
    delta = check_delta(delta)
    profile = smoothness_profile(p, delta)
    wd = weight_diagnostics(w, delta)
    trimmed = None
    if w.is_trimmed and 2 <= n <= p.N - 2:
        trimmed = delta2_upper_trimmed(p.N, n, *w.params, profile.c_min, delta)
    return BoundsReport(
        delta=delta,
        c_min=profile.c_min,
        var_upper_weights=variance_upper_weights(p.N, n, wd.sup_bound_a, var),
        var_upper_d1=None if d1_moment is None else variance_upper_d1(p.N, n, d1_moment),
        delta2_upper_holder=delta2_upper_holder(n, wd.holder_B_at_delta, delta, var),
        delta2_upper_trimmed=trimmed,
        theorem2_growth=theorem2_growth(p.N, n, delta),
        g1_sup_bound=g1_sup_bound(wd.sup_bound_a, profile.c_min, n, p.N, delta),
    )


def _enumerable(N, k, factor=1):
    return math.comb(N, k) * factor <= ENUMERATION_GUARD


def theorem1_report(
    p: Population,
    w: WeightScheme,
    n,
    deltas: Sequence[float] = DEFAULT_DELTAS,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    sigma_tilde=None,
    sigma_source=None,
    d1_moment=None,
):
    """Assemble condition values, per-delta bounds and the weight constants
    used by the bounded-weights normal approximation.

    sigma_tilde and E (D_1 S_n)^2 are computed exactly when the population is
    small enough to enumerate and are otherwise taken from the arguments.
    """
    n = check_sample_size(p, w, n)
    if p.is_constant:
        raise DomainError("a constant population has sigma_tilde = 0")

    if sigma_tilde is None and _enumerable(p.N, n):
        sigma_tilde = math.sqrt(enumerate_distribution(p, w, n).var_s)
        sigma_source = "exact"
    if sigma_tilde is not None and not sigma_tilde > 0:
        raise DomainError(f"sigma_tilde must be positive, got {sigma_tilde}")
    if d1_moment is None and _enumerable(p.N, n + 1, (n + 1) * n):
        d1_moment = exact_d1_moment(p, w, n)

    var = pop_variance(p)
    deltas = tuple(check_delta(d) for d in deltas)
    holder_b = {d: weight_diagnostics(w, d).holder_B_at_delta for d in deltas}
    holder_stable = {d: None for d in deltas}
    if w.kind is not WeightKind.EXPLICIT and 2 * n < p.N:
        wide = w.resize(2 * n)
        holder_stable = {d: weight_diagnostics(wide, d).holder_B_at_delta for d in deltas}

    a = float(np.max(np.abs(w.c)))
    moment = second_moment(p)
    stable = None
    if all(v is not None for v in holder_stable.values()):
        # B(delta) not growing from n to 2n at some delta
        stable = any(
            holder_stable[d] <= holder_b[d] * (1 + HOLDER_RTOL) for d in deltas
        )
    conditions = condition_report(p, w, n, epsilons)
    flags = {
        "weights_bounded": math.isfinite(a),
        "holder_stable": stable,
        "second_moment_finite": math.isfinite(moment),
        "sigma_tilde_positive": None if sigma_tilde is None else sigma_tilde > 0,
        # largest g1-form Erdos-Renyi value over the epsilon grid
        "er_g1_max": max(conditions.er_g1.values()),
    }

    report = TheoremOneReport(
        conditions=conditions,
        bounds=tuple(_bounds(p, w, n, d, var, d1_moment) for d in deltas),
        holder_b=holder_b,
        holder_stable=holder_stable,
        sup_bound_a=a,
        second_moment=moment,
        sigma_tilde=sigma_tilde,
        sigma_source=sigma_source,
        flags=flags,
    )
    logger.debug(f"theorem 1 report for N = {p.N}, n = {n}: sigma_tilde {sigma_tilde}")
    return report


def theorem2_report(p: Population, t1, t2, n, deltas: Sequence[float] = DEFAULT_DELTAS):
    """Per-delta smoothness constant, growth rate and trimmed-mean bounds for
    the (t1, t2) trimmed mean."""
    n = _as_int("n", n)
    w = trimmed_weights(t1, t2, n)
    check_sample_size(p, w, n)
    var = pop_variance(p)
    return tuple(_bounds(p, w, n, check_delta(d), var, None) for d in deltas)


def report_rows(report: TheoremOneReport):
    """Flatten a report into (grid, value, quantity, result) rows, one group
    per epsilon and per delta grid point."""
    cond = report.conditions
    rows = []
    for e in cond.er_classical:
        rows.append(("epsilon", e, "er_classical", cond.er_classical[e]))
        rows.append(("epsilon", e, "er_g1", cond.er_g1[e]))
        rows.append(("epsilon", e, "lindeberg_g1", cond.lindeberg_g1[e]))
    for b in report.bounds:
        for name in BOUND_FIELDS:
            rows.append(("delta", b.delta, name, getattr(b, name)))
        rows.append(("delta", b.delta, "holder_b", report.holder_b[b.delta]))
        rows.append(("delta", b.delta, "holder_b_at_2n", report.holder_stable[b.delta]))
    return rows
