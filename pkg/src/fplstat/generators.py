# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Synthetic population families. A population is addressed by a descriptor
``kind[:params]``, for example ``equispaced``, ``pareto-quantile:3`` or
``two-point:0,1,0.1``. Quantile kinds use x_k = Q(k / (N + 1)).
"""

import logging
import math
from collections import namedtuple
from fractions import Fraction

import numpy as np
from scipy import stats

from .errors import DomainError
from .population import load_population, make_population

logger = logging.getLogger(__name__)

Generator = namedtuple("Generator", ["func", "nparams", "help"])
generators = {}


def generator(name, nparams=0, help=""):
    def decorator(func):
        generators[name] = Generator(func, nparams, help)
        return func

    return decorator


def _quantile_grid(N):
    return np.arange(1, N + 1) / (N + 1)


@generator("equispaced", help="x_k = (k - 1) / N")
def equispaced(N):
    return np.arange(N) / N


@generator("uniform-quantile", help="x_k = k / (N + 1)")
def uniform_quantile(N):
    return _quantile_grid(N)


@generator("normal-quantile", help="standard normal quantiles")
def normal_quantile(N):
    return stats.norm.ppf(_quantile_grid(N))


@generator("exponential-quantile", help="unit exponential quantiles")
def exponential_quantile(N):
    return stats.expon.ppf(_quantile_grid(N))


@generator("pareto-quantile", nparams=1, help="Pareto(alpha) quantiles, support [1, inf)")
def pareto_quantile(N, alpha):
    if not alpha > 0:
        raise DomainError(f"pareto shape must be positive, got {alpha}")
    return stats.pareto.ppf(_quantile_grid(N), alpha)


@generator("two-point", nparams=3, help="floor(split N) units at low, the rest at high")
def two_point(N, low, high, split):
    if not 0 <= split <= 1:
        raise DomainError(f"two-point split must lie in [0, 1], got {split}")
    lows = math.floor(Fraction(str(split)) * N)
    return np.concatenate([np.full(lows, float(low)), np.full(N - lows, float(high))])


def parse_generator(desc):
    """Split ``kind:p1,p2,...`` into the kind and its numeric parameters.
    ``from-file:PATH`` keeps the path as its single parameter."""
    kind, _, rest = desc.partition(":")
    if kind == "from-file":
        if not rest:
            raise DomainError("from-file needs a path")
        return kind, (rest,)
    if kind not in generators:
        raise DomainError(f"unknown population kind `{kind}`")
    try:
        params = tuple(float(v) for v in rest.split(",")) if rest else ()
    except ValueError:
        raise DomainError(f"population `{kind}`: parameters must be numbers, got {rest!r}")
    expected = generators[kind].nparams
    if len(params) != expected:
        raise DomainError(f"population `{kind}` takes {expected} parameter(s), got {len(params)}")
    return kind, params


def generate_population(kind, params, N):
    """Build a sorted population of size N. ``from-file`` ignores N unless it
    is given, in which case the file must hold exactly N values."""
    if kind == "from-file":
        p = load_population(*params)
        if N is not None and p.N != N:
            raise DomainError(f"`{params[0]}` holds {p.N} values, expected {N}")
        return p
    if kind not in generators:
        raise DomainError(f"unknown population kind `{kind}`")
    if N is None or N < 2:
        raise DomainError(f"a generated population needs N >= 2, got {N}")
    func, nparams, _ = generators[kind]
    if len(params) != nparams:
        raise DomainError(f"population `{kind}` takes {nparams} parameter(s), got {len(params)}")
    logger.debug(f"generating {kind} population with N = {N}")
    return make_population(func(N, *params))


def population_from_descriptor(desc, N=None):
    kind, params = parse_generator(desc)
    return generate_population(kind, params, N)
