# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Weight sequences c_1, ..., c_n of an L-statistic.

Weights come from a weight function J evaluated on the grid j/(n+1), from the
index form of a trimmed mean, or from explicit values. Built-in weight
functions are registered with :func:`weight_function` and addressed by the
descriptors accepted by :func:`parse_weights`.
"""

import enum
import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError
from .population import check_delta
from .util.readers import read_values

logger = logging.getLogger(__name__)

WeightFunction = namedtuple("WeightFunction", ["func", "nparams", "help"])
weight_functions = {}


def weight_function(name, nparams=0, help=""):
    """Register a weight function J(u, *params) under ``name``."""

    def decorator(func):
        weight_functions[name] = WeightFunction(func, nparams, help)
        return func

    return decorator


@weight_function("mean", help="J(u) = 1, the sample mean")
def constant(u):
    return 1.0


@weight_function("identity", help="J(u) = u")
def identity(u):
    return u


@weight_function("gini", help="J(u) = 2u - 1, Gini mean difference type")
def gini(u):
    return 2 * u - 1


@weight_function("trimmed-j", nparams=2, help="J(u) = 1{t1 < u < t2} / (t2 - t1)")
def trimmed_j(u, t1, t2):
    return 1.0 / (t2 - t1) if t1 < u < t2 else 0.0


class WeightKind(enum.Enum):
    EXPLICIT = "explicit"
    FROM_FUNCTION = "from-function"
    TRIMMED_INDEX = "trimmed-index"


@dataclass(frozen=True, eq=False)
class WeightScheme:
    """Weights c_1..c_n built for sample size ``n = len(c)``.

    ``source`` is the descriptor the scheme was built from (for example
    ``identity`` or ``trimmed:0.1,0.9``) and ``params`` its numeric parameters.
    """

    kind: WeightKind
    c: np.ndarray
    source: str
    params: Tuple[float, ...] = ()
    function: Optional[Callable] = field(default=None, repr=False)

    @property
    def n(self):
        return len(self.c)

    @property
    def is_trimmed(self):
        return self.kind is WeightKind.TRIMMED_INDEX

    def resize(self, n):
        """Rebuild the same scheme for another sample size."""
        if self.kind is WeightKind.TRIMMED_INDEX:
            return trimmed_weights(*self.params, n)
        if self.kind is WeightKind.FROM_FUNCTION:
            return weights_from_function(
                self.function, n, params=self.params, source=self.source
            )
        raise DomainError(f"explicit weights `{self.source}` cannot be resized")

    def __repr__(self):
        return f"WeightScheme({self.source!r}, n={self.n})"


@dataclass(frozen=True)
class WeightDiagnostics:
    sup_bound_a: float
    holder_B_at_delta: float
    delta_used: float


def _freeze(c):
    c = np.array(c, dtype=np.float64)
    c.setflags(write=False)
    return c


def weights_from_function(J, n, params=(), source=None):
    """c_j = J(j / (n + 1), *params) for j = 1..n."""
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")
    c = []
    for j in range(1, n + 1):
        value = float(J(j / (n + 1), *params))
        if not math.isfinite(value):
            raise DomainError(f"weight function is not finite at u = {j}/{n + 1}")
        c.append(value)
    source = source or getattr(J, "__name__", "function")
    return WeightScheme(WeightKind.FROM_FUNCTION, _freeze(c), source, tuple(params), J)


def explicit_weights(values, source="explicit"):
    c = _freeze(values).ravel()
    if c.size < 1:
        raise DomainError("explicit weights need at least one value")
    if not np.all(np.isfinite(c)):
        raise DomainError("explicit weights must be finite")
    return WeightScheme(WeightKind.EXPLICIT, c, source)


def _check_trimming(t1, t2):
    if not 0 < t1 < t2 < 1:
        raise DomainError(f"trimming requires 0 < t1 < t2 < 1, got {t1}, {t2}")


def trimming_bounds(t1, t2, n):
    """Return (s, t) = ([t1 n] + 1, [t2 n]), the first and last retained order
    statistic. The floors are taken in exact decimal arithmetic so that, e.g.,
    0.29 * 100 gives 29."""
    _check_trimming(t1, t2)
    f1, f2 = Fraction(str(t1)), Fraction(str(t2))
    if n * (f2 - f1) <= 1:
        raise DomainError(f"trimmed mean requires n > 1/(t2 - t1), got n = {n}")
    return math.floor(f1 * n) + 1, math.floor(f2 * n)


def trimmed_weights(t1, t2, n):
    """Index form of the (t1, t2) trimmed mean: c_j = n / ([t2 n] - [t1 n]) for
    [t1 n] + 1 <= j <= [t2 n], zero elsewhere."""
    s, t = trimming_bounds(t1, t2, n)
    c = np.zeros(n)
    c[s - 1 : t] = n / (t - s + 1)
    return WeightScheme(
        WeightKind.TRIMMED_INDEX, _freeze(c), f"trimmed:{t1},{t2}", (t1, t2)
    )


def weight_diagnostics(w: WeightScheme, delta):
    """Return the sup bound a = max |c_j| and the grid Hoelder constant
    B = max |c_p - c_{p-1}| (n + 1)^delta. The latter is a lower bound on the
    Hoelder constant of any J that generated the weights."""
    delta = check_delta(delta)
    a = float(np.max(np.abs(w.c)))
    if w.n == 1:
        return WeightDiagnostics(a, 0.0, delta)
    B = float(np.max(np.abs(np.diff(w.c)))) * (w.n + 1) ** delta
    return WeightDiagnostics(a, B, delta)


def _parse_params(name, text, expected):
    try:
        params = tuple(float(p) for p in text.split(",")) if text else ()
    except ValueError:
        raise DomainError(f"weights `{name}`: parameters must be numbers, got {text!r}")
    if len(params) != expected:
        raise DomainError(
            f"weights `{name}` takes {expected} parameter(s), got {len(params)}"
        )
    return params


def parse_weights(desc, n):
    """Build a scheme for sample size ``n`` from a descriptor: ``mean``,
    ``identity``, ``gini``, ``trimmed:t1,t2``, ``trimmed-j:t1,t2`` or
    ``file:PATH``."""
    name, _, rest = desc.partition(":")
    if name == "file":
        values = read_values(rest)
        if len(values) != n:
            raise DomainError(
                f"weights file `{rest}` holds {len(values)} values, sample size is {n}"
            )
        return explicit_weights(values, source=desc)
    if name == "trimmed":
        return trimmed_weights(*_parse_params(name, rest, 2), n)
    if name not in weight_functions:
        raise DomainError(f"unknown weights `{desc}`")
    func, nparams, _ = weight_functions[name]
    params = _parse_params(name, rest, nparams)
    if name == "trimmed-j":
        _check_trimming(*params)
    return weights_from_function(func, n, params=params, source=desc)
