# Any copyright is dedicated to the public domain.
# http://creativecommons.org/publicdomain/zero/1.0/

import math
from fractions import Fraction

import numpy as np
import pytest

from fplstat.errors import DomainError, ResourceGuardError
from fplstat.lstat import expected_l, g1_table, s_statistic
from fplstat.oracle import (
    enumerate_distribution,
    exact_d1_moment,
    exact_delta2,
    exact_linear_moments,
    subset_s_table,
)
from fplstat.population import make_population, pop_variance
from fplstat.weights import parse_weights


def test_enumerate_three_points():
    p = make_population([0.0, 1.0, 2.0])
    dist = enumerate_distribution(p, parse_weights("mean", 1), 1)
    third = Fraction(1, 3)
    assert [prob for _, prob in dist.atoms] == [third] * 3
    assert [s for s, _ in dist.atoms] == pytest.approx([-1.0, 0.0, 1.0])
    assert dist.var_s == pytest.approx(2 / 3)
    assert dist.expected_l == pytest.approx(1.0)
    assert dist.cdf(0.5) == Fraction(2, 3)
    assert dist.cdf(-2.0) == 0


def test_atoms_merge_equal_values():
    p = make_population([0.0, 0.0, 1.0, 1.0])
    dist = enumerate_distribution(p, parse_weights("mean", 1), 1)
    assert [prob for _, prob in dist.atoms] == [Fraction(1, 2), Fraction(1, 2)]
    assert sum(prob for _, prob in dist.atoms) == 1


def test_constant_population():
    p = make_population([2.5] * 5)
    dist = enumerate_distribution(p, parse_weights("gini", 3), 3)
    assert dist.atoms == ((0.0, Fraction(1)),)
    assert dist.var_s == 0.0
    with pytest.raises(DomainError):
        dist.ks_distance()


@pytest.mark.parametrize("desc,n", (("mean", 3), ("gini", 2), ("trimmed:0.1,0.9", 4)))
def test_enumeration_mean_matches_expected_l(small_pop, desc, n):
    w = parse_weights(desc, n)
    dist = enumerate_distribution(small_pop, w, n)
    assert dist.expected_l == pytest.approx(expected_l(small_pop, w, n), abs=1e-12)
    assert sum(prob for _, prob in dist.atoms) == 1


def test_variance_of_the_mean(small_pop):
    N, n = small_pop.N, 3
    dist = enumerate_distribution(small_pop, parse_weights("mean", n), n)
    assert dist.var_s == pytest.approx(pop_variance(small_pop) * (N - n) / (N - 1))
    assert 0 < dist.ks_distance() < 1


def test_subset_table_uses_colex_rank(small_pop):
    w = parse_weights("gini", 2)
    table = subset_s_table(small_pop, w, 2)
    assert len(table) == math.comb(6, 2)
    # 0-based subset {2, 4} has rank C(2, 1) + C(4, 2) = 8
    expected = s_statistic(small_pop, w, 2, small_pop.values[[2, 4]]).S
    assert table[8] == pytest.approx(expected)


def test_resource_guard(equispaced):
    p = equispaced(40)
    with pytest.raises(ResourceGuardError):
        enumerate_distribution(p, parse_weights("mean", 20), 20)


def test_linear_moments_of_the_mean(small_pop):
    mean_u, cov, r1_sq = exact_linear_moments(small_pop, parse_weights("mean", 3), 3)
    assert mean_u == pytest.approx(0.0, abs=1e-12)
    assert cov == pytest.approx(0.0, abs=1e-12)
    assert r1_sq == pytest.approx(0.0, abs=1e-12)


def test_variance_decomposition(small_pop):
    N, n = small_pop.N, 3
    w = parse_weights("gini", n)
    _, cov, r1_sq = exact_linear_moments(small_pop, w, n)
    sigma1_sq = g1_table(small_pop, w, n).sigma1_sq
    var_u = n * sigma1_sq * (N - n) / (N - 1)
    var_s = enumerate_distribution(small_pop, w, n).var_s
    assert var_s == pytest.approx(var_u + 2 * cov + r1_sq)
    assert r1_sq > 0


def test_d1_moment():
    p = make_population([0.0, 1.0])
    assert exact_d1_moment(p, parse_weights("mean", 1), 1) == pytest.approx(1.0)


def test_d1_moment_of_the_mean(small_pop):
    N, n = small_pop.N, 2
    # D_1 = (X_a - X_b) / sqrt(n) for the mean
    expected = 2 * N * pop_variance(small_pop) / (N - 1) / n
    assert exact_d1_moment(small_pop, parse_weights("mean", n), n) == pytest.approx(expected)


def test_delta2_of_the_minimum(equispaced):
    p = equispaced(6)
    w = parse_weights("trimmed:0.1,0.9", 2)
    assert list(w.c) == [2.0, 0.0]
    assert exact_delta2(p, w, 2) == pytest.approx(16 / 3 * 70 / 1080)


def test_delta2_vanishes_for_the_mean(small_pop):
    assert exact_delta2(small_pop, parse_weights("mean", 3), 3) == pytest.approx(0.0, abs=1e-20)


def test_delta2_domain(small_pop):
    with pytest.raises(DomainError):
        exact_delta2(small_pop, parse_weights("mean", 1), 1)
    with pytest.raises(DomainError):
        exact_delta2(small_pop, parse_weights("mean", 5), 5)


def test_nearly_full_samples_enumerate(equispaced):
    p = equispaced(70)
    N, n = 70, 68
    w = parse_weights("mean", n)
    table = subset_s_table(p, w, n)
    assert len(table) == math.comb(N, n)
    # rank 0 holds the smallest n values, the last rank the largest n
    assert table[0] == pytest.approx(s_statistic(p, w, n, p.values[:n]).S)
    assert table[-1] == pytest.approx(s_statistic(p, w, n, p.values[2:]).S)
    dist = enumerate_distribution(p, w, n)
    assert dist.var_s == pytest.approx(pop_variance(p) * (N - n) / (N - 1))


@pytest.mark.parametrize(
    "func", (enumerate_distribution, subset_s_table, exact_linear_moments)
)
def test_resource_guard_before_tables(equispaced, func):
    p = equispaced(100)
    with pytest.raises(ResourceGuardError):
        func(p, parse_weights("mean", 50), 50)


SCHEMES = ("mean", "identity", "gini", "trimmed:0.1,0.9")


def random_population(N):
    return make_population(np.random.default_rng(100 + N).standard_normal(N))


def enumerable_instances():
    for N in range(2, 11):
        for n in range(1, N):
            for desc in SCHEMES:
                # trimming needs n > 1 / (t2 - t1)
                if desc.startswith("trimmed") and n < 2:
                    continue
                yield pytest.param(N, n, desc, id=f"{desc}-{N}-{n}")


@pytest.mark.parametrize("N", range(2, 11))
def test_variance_of_the_mean_for_every_size(N):
    p = random_population(N)
    for n in range(1, N):
        dist = enumerate_distribution(p, parse_weights("mean", n), n)
        assert abs(dist.var_s - pop_variance(p) * (N - n) / (N - 1)) <= 1e-12


@pytest.mark.parametrize("N,n,desc", enumerable_instances())
def test_linear_part_is_centered_and_uncorrelated(N, n, desc):
    p = random_population(N)
    w = parse_weights(desc, n)
    mean_u, cov, r1_sq = exact_linear_moments(p, w, n)
    assert abs(mean_u) <= 1e-12
    assert abs(cov) <= 1e-10
    if 2 <= n <= N - 2:
        assert r1_sq <= exact_delta2(p, w, n) + 1e-10
    else:
        assert r1_sq <= 1e-10
