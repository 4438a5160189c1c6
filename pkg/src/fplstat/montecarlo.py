# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Seeded Monte Carlo estimates of Var S_n, the degeneracy quantity delta_2,
E (D_1 S_n)^2 and E R_1^2, and the Kolmogorov-Smirnov distance between the
law of S_n / sigma and the standard normal.

Replicate ``r`` draws from stream ``r`` of the run's seed. Replicates are
split into contiguous stream ranges, evaluated (optionally in worker
processes) and concatenated in stream order, so estimates are bit-identical
for any number of workers.
"""

import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .combinatorics import _as_int
from .errors import DomainError
from .lstat import check_sample_size, evaluate_sample, expected_l, g1_table, l_statistic
from .oracle import enumerate_distribution
from .population import Population
from .sampling import (
    RngSpec,
    d1_difference,
    d2_difference,
    draw_extended,
    replicate_streams,
    srswor,
)
from .util.parallel import ordered_map
from .weights import WeightScheme

logger = logging.getLogger(__name__)

SIGMA_SOURCES = ("exact", "mc", "user")

# streams handed to one worker job
CHUNK_SIZE = 2000


@dataclass(frozen=True)
class McEstimate:
    """``std_error`` is the sample standard deviation of the averaged terms
    divided by sqrt(reps)."""

    value: float
    std_error: float
    reps: int
    seed: RngSpec


@dataclass(frozen=True)
class NormalityReport:
    ks_distance: float
    reps: int
    sigma_source: str
    sigma: float
    sigma_std_error: Optional[float] = None


def normal_cdf(x):
    if not math.isfinite(x):
        raise DomainError(f"normal_cdf needs a finite argument, got {x}")
    return float(ndtr(x))


def ks_distance(z):
    """sup_x |F_R(x) - Phi(x)| for the empirical CDF F_R of the values ``z``."""
    z = np.sort(np.asarray(z, dtype=np.float64))
    R = len(z)
    if R == 0:
        raise DomainError("ks_distance needs at least one value")
    phi = ndtr(z)
    i = np.arange(1, R + 1)
    return float(max(np.max(np.abs(i / R - phi)), np.max(np.abs((i - 1) / R - phi))))


def _check_reps(reps, minimum=2):
    reps = _as_int("reps", reps)
    if reps < minimum:
        raise DomainError(f"at least {minimum} replicates are required, got {reps}")
    return reps


def _run_chunk(replicate, seed, streams):
    return np.array([replicate(RngSpec(seed, r)) for r in streams], dtype=np.float64)


def run_replicates(replicate, reps, rng: RngSpec, max_workers=None):
    """Evaluate ``replicate(RngSpec(rng.seed, r))`` for r = 0..reps-1."""
    chunks = replicate_streams(reps, max(1, math.ceil(reps / CHUNK_SIZE)))
    logger.debug(f"running {reps} replicates in {len(chunks)} chunk(s)")
    results = ordered_map(partial(_run_chunk, replicate, rng.seed), chunks, max_workers)
    return np.concatenate(results)


def mean_estimate(terms, rng):
    R = len(terms)
    mean = math.fsum(terms) / R
    sd = math.sqrt(math.fsum((terms - mean) ** 2) / (R - 1))
    return McEstimate(mean, sd / math.sqrt(R), R, rng)


def variance_estimate(values, rng):
    R = len(values)
    mean = math.fsum(values) / R
    squares = (values - mean) ** 2
    var = math.fsum(squares) / (R - 1)
    sq_mean = math.fsum(squares) / R
    sd = math.sqrt(math.fsum((squares - sq_mean) ** 2) / (R - 1))
    return McEstimate(var, sd / math.sqrt(R), R, rng)


def _s_replicate(p, w, n, expected, spec):
    draw = srswor(p.N, n, spec)
    return math.sqrt(n) * (l_statistic(w, p.values[draw.indices - 1]) - expected)


def _l_replicate(p, w, n, spec):
    draw = srswor(p.N, n, spec)
    return l_statistic(w, p.values[draw.indices - 1])


def _r1_replicate(p, w, n, decomposition, spec):
    draw = srswor(p.N, n, spec)
    return evaluate_sample(p, w, n, decomposition, draw.indices).R1


def _d1_replicate(p, w, n, spec):
    return d1_difference(p, w, n, draw_extended(p.N, n + 1, spec)) ** 2


def _d2_replicate(p, w, n, n_star, spec):
    return (n_star * d2_difference(p, w, n, draw_extended(p.N, n + 2, spec))) ** 2


def _s_r1_replicate(p, w, n, decomposition, spec):
    draw = srswor(p.N, n, spec)
    ev = evaluate_sample(p, w, n, decomposition, draw.indices)
    return ev.S, ev.R1


def s_r1_replicates(
    p: Population, w: WeightScheme, n, reps, rng: RngSpec, decomposition=None, max_workers=None
):
    """S_n and R_1 from the same seeded samples; returns two arrays."""
    n = check_sample_size(p, w, n)
    reps = _check_reps(reps)
    if decomposition is None:
        decomposition = g1_table(p, w, n)
    replicate = partial(_s_r1_replicate, p, w, n, decomposition)
    values = run_replicates(replicate, reps, rng, max_workers).reshape(reps, 2)
    return values[:, 0], values[:, 1]


def s_replicates(p: Population, w: WeightScheme, n, reps, rng: RngSpec, max_workers=None):
    """S_n for each of ``reps`` seeded samples, in stream order."""
    n = check_sample_size(p, w, n)
    reps = _check_reps(reps)
    replicate = partial(_s_replicate, p, w, n, expected_l(p, w, n))
    return run_replicates(replicate, reps, rng, max_workers)


def mc_variance_s(p: Population, w: WeightScheme, n, reps, rng: RngSpec, max_workers=None):
    values = s_replicates(p, w, n, reps, rng, max_workers)
    return variance_estimate(values, rng)


def mc_expected_l(p: Population, w: WeightScheme, n, reps, rng: RngSpec, max_workers=None):
    """Monte Carlo estimate of E L_n. S_n is always centred with the exact
    value; this is only a cross-check."""
    n = check_sample_size(p, w, n)
    reps = _check_reps(reps)
    terms = run_replicates(partial(_l_replicate, p, w, n), reps, rng, max_workers)
    return mean_estimate(terms, rng)


def mc_r1_moment(p: Population, w: WeightScheme, n, reps, rng: RngSpec, max_workers=None):
    """Monte Carlo estimate of E R_1^2."""
    n = check_sample_size(p, w, n)
    reps = _check_reps(reps)
    replicate = partial(_r1_replicate, p, w, n, g1_table(p, w, n))
    terms = run_replicates(replicate, reps, rng, max_workers) ** 2
    return mean_estimate(terms, rng)


def mc_d1_moment(p: Population, w: WeightScheme, n, reps, rng: RngSpec, max_workers=None):
    """Monte Carlo estimate of E (D_1 S_n)^2."""
    n = check_sample_size(p, w, n)
    reps = _check_reps(reps)
    terms = run_replicates(partial(_d1_replicate, p, w, n), reps, rng, max_workers)
    return mean_estimate(terms, rng)


def mc_delta2(p: Population, w: WeightScheme, n, reps, rng: RngSpec, max_workers=None):
    """Monte Carlo estimate of delta_2 = E (n_* D_2 S_n)^2, n_* = min(n, N - n)."""
    n = check_sample_size(p, w, n)
    reps = _check_reps(reps)
    if n < 2 or n + 2 > p.N:
        raise DomainError(f"delta2 requires 2 <= n and n + 2 <= N, got n = {n}, N = {p.N}")
    replicate = partial(_d2_replicate, p, w, n, min(n, p.N - n))
    terms = run_replicates(replicate, reps, rng, max_workers)
    return mean_estimate(terms, rng)


def ks_normality(
    p: Population,
    w: WeightScheme,
    n,
    reps,
    rng: RngSpec,
    sigma_source="mc",
    sigma=None,
    max_workers=None,
    replicates=None,
):
    """KS distance between the empirical law of S_n / sigma and Phi.

    ``sigma_source`` selects sigma: ``exact`` enumerates all samples, ``mc``
    uses the standard deviation of the same replicates and ``user`` takes the
    ``sigma`` argument. Precomputed ``replicates`` may be passed in.
    """
    if sigma_source not in SIGMA_SOURCES:
        raise DomainError(f"unknown sigma source `{sigma_source}`")
    if replicates is None:
        replicates = s_replicates(p, w, n, reps, rng, max_workers)
    replicates = np.asarray(replicates, dtype=np.float64)

    sigma_std_error = None
    if sigma_source == "exact":
        sigma = math.sqrt(enumerate_distribution(p, w, n).var_s)
    elif sigma_source == "mc":
        est = variance_estimate(replicates, rng)
        sigma = math.sqrt(est.value)
        if sigma > 0:
            sigma_std_error = est.std_error / (2 * sigma)
    elif sigma is None:
        raise DomainError("sigma source `user` needs a sigma value")

    if not sigma > 0:
        raise DomainError(f"sigma must be positive to standardise S_n, got {sigma}")
    ks = ks_distance(replicates / sigma)
    logger.debug(f"ks distance {ks:.5f} from {len(replicates)} replicates, sigma {sigma}")
    return NormalityReport(ks, len(replicates), sigma_source, float(sigma), sigma_std_error)
