# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Experiment plans: the sequence of (N, n) pairs a convergence study runs
through, together with the population family, weights and Monte Carlo
settings shared by every row.

Plans are read from YAML or ``key = value`` files; values given on the
command line override file values.
"""

import logging
import math
from pprint import pformat

from voluptuous import All, Any, Coerce, Invalid, Optional, Range, Required

from .diagnostics import DEFAULT_DELTAS, DEFAULT_EPSILONS
from .errors import DomainError, PlanValidationError
from .generators import parse_generator
from .util.hash import hash_object
from .util.readers import load_mapping
from .util.schema import Schema, validate_schema

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (40, 80, 160, 320, 640)
REGIMES = ("half", "sparse")
LIST_KEYS = ("family", "sizes", "regimes", "epsilons", "deltas")


def family_pair(value):
    """Accept ``N:n`` strings or two-item lists and return [N, n]."""
    if isinstance(value, str):
        N, sep, n = value.partition(":")
        if sep:
            try:
                return [int(N), int(n)]
            except ValueError:
                pass
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return [int(v) for v in value]
        except (TypeError, ValueError):
            pass
    raise Invalid(f"expected a `N:n` pair, got {value!r}")


plan_schema = Schema(
    {
        Required("population"): str,
        Optional("family"): [family_pair],
        Optional("sizes"): [All(Coerce(int), Range(min=2))],
        Optional("regimes"): [Any(*REGIMES)],
        Required("weights"): str,
        Required("reps"): All(Coerce(int), Range(min=100)),
        Required("seed"): All(Coerce(int), Range(min=0, max=2**64 - 1)),
        Required("epsilons"): [All(Coerce(float), Range(min=0, min_included=False))],
        Required("deltas"): [
            All(Coerce(float), Range(min=0.5, min_included=False, max=1.0))
        ],
        Required("sigma-source"): Any("auto", "exact", "mc"),
        Optional("out"): Any(None, str),
    }
)


def plan_defaults():
    return {
        "population": "equispaced",
        "weights": "trimmed:0.1,0.9",
        "reps": 2000,
        "seed": 0,
        "epsilons": list(DEFAULT_EPSILONS),
        "deltas": list(DEFAULT_DELTAS),
        "sigma-source": "auto",
    }


def regime_size(N, regime):
    if regime == "half":
        return N // 2
    return math.floor(N**0.6)


class ExperimentPlan(dict):
    """An immutable, validated experiment plan."""

    def __init__(self, **kwargs):
        dict.__init__(self, **kwargs)
        self._id = None

    def __delitem__(self, key):
        raise TypeError("ExperimentPlan does not support deletion")

    def __setitem__(self, key, value):
        raise TypeError("ExperimentPlan does not support assignment")

    def update(self, *args, **kwargs):
        raise TypeError("ExperimentPlan does not support update")

    def __reduce__(self):
        return (_rebuild_plan, (dict(self),))

    def __getitem__(self, k):
        try:
            return super().__getitem__(k)
        except KeyError:
            raise KeyError(f"plan field {k!r} not found")

    @property
    def id(self):
        if not self._id:
            self._id = hash_object(self)
        return self._id

    def pairs(self):
        """The (N, n) rows of the study, in plan order."""
        if "family" in self:
            return [tuple(pair) for pair in self["family"]]
        sizes = self.get("sizes", DEFAULT_SIZES)
        regimes = self.get("regimes", REGIMES)
        return [(N, regime_size(N, r)) for N in sizes for r in regimes]

    def check(self):
        if "family" in self and ("sizes" in self or "regimes" in self):
            raise PlanValidationError("a plan takes either `family` or `sizes`/`regimes`")
        bad = [f"{N}:{n}" for N, n in self.pairs() if not 1 <= n < N]
        if bad:
            raise PlanValidationError(f"plan pairs need 1 <= n < N: {', '.join(bad)}")
        try:
            parse_generator(self["population"])
        except DomainError as e:
            raise PlanValidationError(f"invalid population: {e}")

    def __str__(self):
        return f"ExperimentPlan(id={self.id})"

    def __repr__(self):
        return pformat(dict(self), indent=2)


def _rebuild_plan(data):
    return ExperimentPlan(**data)


def _split_lists(raw):
    out = dict(raw)
    for key in LIST_KEYS:
        value = out.get(key)
        if isinstance(value, str):
            out[key] = [v.strip() for v in value.split(",") if v.strip()]
        elif isinstance(value, (int, float)):
            out[key] = [value]
    return out


def make_plan(raw):
    """Validate a raw mapping (with defaults filled in) into an ExperimentPlan."""
    data = plan_defaults()
    data.update({k: v for k, v in raw.items() if v is not None})
    validated = validate_schema(plan_schema, _split_lists(data), "Invalid experiment plan:")
    plan = ExperimentPlan(**validated)
    plan.check()
    logger.debug(f"validated plan {plan.id}")
    return plan


def load_plan(path=None, overrides=None):
    """Read a plan file, if any, and apply command line overrides."""
    raw = load_mapping(path) if path else {}
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return make_plan(raw)
