# Any copyright is dedicated to the public domain.
# http://creativecommons.org/publicdomain/zero/1.0/

import itertools
import math

import numpy as np
import pytest

from fplstat.errors import DomainError
from fplstat.lstat import (
    check_indices,
    check_sample_size,
    evaluate_sample,
    expected_l,
    g1_sup_bound,
    g1_table,
    g1_table_naive,
    l_statistic,
    s_statistic,
    spacing_sq_moment,
    spacing_sq_moment_bound,
)
from fplstat.population import make_population, pop_mean, smoothness_profile
from fplstat.weights import explicit_weights, parse_weights


def test_l_statistic_sorts_the_sample():
    w = explicit_weights([0.0, 0.0, 3.0])
    assert l_statistic(w, [5.0, 1.0, 2.0]) == 5.0
    assert l_statistic(parse_weights("mean", 4), [1.0, 2.0, 3.0, 6.0]) == 3.0
    with pytest.raises(DomainError):
        l_statistic(w, [1.0, 2.0])


def test_expected_max():
    p = make_population([0.0, 1.0, 2.0])
    w = explicit_weights([0.0, 2.0])
    assert expected_l(p, w, 2) == pytest.approx(5 / 3)


def test_expected_mean_is_population_mean(small_pop, equispaced):
    assert expected_l(small_pop, parse_weights("mean", 4), 4) == pytest.approx(
        pop_mean(small_pop)
    )
    # log-space path
    p = equispaced(250)
    assert expected_l(p, parse_weights("mean", 40), 40) == pytest.approx(
        pop_mean(p), rel=1e-10
    )


@pytest.mark.parametrize("desc", ("gini", "trimmed:0.1,0.9", "identity"))
def test_constant_population_has_zero_s(desc):
    p = make_population([0.3] * 7)
    w = parse_weights(desc, 5)
    ev = s_statistic(p, w, 5, [0.3] * 5)
    assert ev.S == 0.0
    d = g1_table(p, w, 5)
    assert d.sigma1_sq == 0.0


def test_check_sample_size(small_pop):
    with pytest.raises(DomainError):
        check_sample_size(small_pop, parse_weights("mean", 6), 6)
    with pytest.raises(DomainError):
        check_sample_size(small_pop, parse_weights("mean", 3), 2)
    assert check_sample_size(small_pop, parse_weights("mean", 2), 2) == 2


def test_check_indices():
    assert list(check_indices(5, [3, 1])) == [3, 1]
    for bad in ([0, 1], [1, 6], [2, 2]):
        with pytest.raises(DomainError):
            check_indices(5, bad)
    with pytest.raises(DomainError):
        check_indices(5, [1, 2], size=3)


def test_g1_two_point():
    p = make_population([0.0, 1.0])
    d = g1_table(p, parse_weights("mean", 1), 1)
    assert np.allclose(d.g1, [-0.5, 0.5])
    assert d.sigma1_sq == pytest.approx(0.25)


def test_g1_of_maximum():
    p = make_population([0.0, 0.0, 1.0])
    d = g1_table(p, explicit_weights([0.0, 2.0]), 2)
    r = math.sqrt(2) / 3
    assert np.allclose(d.g1, [-r, -r, 2 * r])
    assert d.sigma1_sq == pytest.approx(4 / 9)


@pytest.mark.parametrize("desc,n", (("gini", 3), ("trimmed:0.1,0.9", 4), ("identity", 5)))
def test_g1_matches_naive(small_pop, desc, n):
    w = parse_weights(desc, n)
    fast = g1_table(small_pop, w, n).g1
    assert np.allclose(fast, g1_table_naive(small_pop, w, n), atol=1e-12)
    assert abs(fast.sum()) < 1e-12


def test_linear_statistic_has_no_remainder(small_pop):
    w = parse_weights("mean", 3)
    d = g1_table(small_pop, w, 3)
    ev = evaluate_sample(small_pop, w, 3, d, [6, 1, 4])
    assert ev.L == pytest.approx((7.0 + 0.0 + 2.0) / 3)
    assert ev.U1 == pytest.approx(ev.S)
    assert ev.R1 == pytest.approx(0.0, abs=1e-12)


def test_evaluate_sample_splits_s(small_pop):
    w = parse_weights("gini", 3)
    d = g1_table(small_pop, w, 3)
    ev = evaluate_sample(small_pop, w, 3, d, [2, 5, 3])
    assert ev.U1 + ev.R1 == pytest.approx(ev.S)
    with pytest.raises(DomainError):
        evaluate_sample(small_pop, w, 3, d, [2, 5])


@pytest.mark.parametrize("N,n", ((10, 3), (220, 5)))
def test_spacing_moment_equispaced(equispaced, N, n):
    # equality holds for an equispaced population
    p = equispaced(N)
    C = smoothness_profile(p, 1.0).c_min
    bound = spacing_sq_moment_bound(N, n, C, 1.0)
    for pos in (1, 2, n + 1):
        assert spacing_sq_moment(p, n, pos) == pytest.approx(bound, rel=1e-9)


def test_spacing_moment_domain(small_pop):
    with pytest.raises(DomainError):
        spacing_sq_moment(small_pop, 5, 1)
    with pytest.raises(DomainError):
        spacing_sq_moment(small_pop, 2, 4)


@pytest.mark.parametrize("delta", (0.6, 1.0))
def test_g1_sup_bound(delta):
    p = make_population(np.random.default_rng(11).normal(size=30))
    n = 10
    w = parse_weights("gini", n)
    a = float(np.max(np.abs(w.c)))
    C = smoothness_profile(p, delta).c_min
    assert np.max(np.abs(g1_table(p, w, n).g1)) <= g1_sup_bound(a, C, n, p.N, delta)


def _random_instances(count, max_N, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        N = int(rng.integers(2, max_N + 1))
        n = int(rng.integers(1, N))
        scale = float(rng.uniform(0.1, 10.0))
        yield make_population(rng.standard_normal(N) * scale), n


def test_mean_g1_reduces_to_centered_values():
    for p, n in _random_instances(200, 100, seed=2024):
        d = g1_table(p, parse_weights("mean", n), n)
        expected = (p.values - pop_mean(p)) / math.sqrt(n)
        tol = 1e-12 * (1 + np.max(np.abs(p.values)))
        assert np.max(np.abs(d.g1 - expected)) <= tol, (p.N, n)


@pytest.mark.parametrize("N", range(2, 11))
def test_mean_has_no_remainder_on_any_sample(N):
    p = make_population(np.random.default_rng(N).standard_normal(N))
    for n in range(1, N):
        w = parse_weights("mean", n)
        d = g1_table(p, w, n)
        for subset in itertools.combinations(range(1, N + 1), n):
            assert abs(evaluate_sample(p, w, n, d, subset).R1) <= 1e-12


@pytest.mark.parametrize(
    "N,n,desc",
    (
        (10, 4, "gini"),
        (17, 9, "identity"),
        (25, 12, "trimmed:0.1,0.9"),
        (40, 7, "trimmed:0.25,0.75"),
        (60, 30, "gini"),
        (60, 13, "identity"),
    ),
)
def test_g1_matches_naive_on_random_populations(N, n, desc):
    p = make_population(np.random.default_rng(N + n).exponential(size=N))
    w = parse_weights(desc, n)
    fast = g1_table(p, w, n).g1
    assert np.allclose(fast, g1_table_naive(p, w, n), rtol=0, atol=1e-11)
