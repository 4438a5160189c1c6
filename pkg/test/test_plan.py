# Any copyright is dedicated to the public domain.
# http://creativecommons.org/publicdomain/zero/1.0/

import pickle
from textwrap import dedent

import pytest

from fplstat.errors import PlanValidationError
from fplstat.plan import DEFAULT_SIZES, ExperimentPlan, load_plan, make_plan, regime_size


def test_defaults():
    plan = make_plan({})
    assert plan["population"] == "equispaced"
    assert plan["weights"] == "trimmed:0.1,0.9"
    assert plan["reps"] == 2000
    assert plan["sigma-source"] == "auto"
    assert len(plan.pairs()) == 2 * len(DEFAULT_SIZES)
    assert plan.pairs()[:2] == [(40, 20), (40, 9)]


def test_regime_size():
    assert regime_size(100, "half") == 50
    assert regime_size(100, "sparse") == 15


def test_family_pairs():
    plan = make_plan({"family": ["50:10", [100, 20]]})
    assert plan.pairs() == [(50, 10), (100, 20)]


def test_family_excludes_sizes():
    with pytest.raises(PlanValidationError):
        make_plan({"family": ["50:10"], "sizes": [40]})


@pytest.mark.parametrize(
    "raw",
    (
        pytest.param({"reps": 10}, id="too few reps"),
        pytest.param({"seed": -1}, id="negative seed"),
        pytest.param({"deltas": [0.5]}, id="delta out of range"),
        pytest.param({"sigma-source": "user"}, id="bad sigma source"),
        pytest.param({"family": ["10:10"]}, id="n equals N"),
        pytest.param({"family": ["ten"]}, id="bad pair"),
        pytest.param({"population": "nope"}, id="unknown population"),
        pytest.param({"bogus": 1}, id="extra key"),
    ),
)
def test_invalid_plans(raw):
    with pytest.raises(PlanValidationError):
        make_plan(raw)


def test_plan_is_read_only():
    plan = make_plan({})
    with pytest.raises(TypeError):
        plan["reps"] = 5
    with pytest.raises(TypeError):
        del plan["reps"]
    with pytest.raises(TypeError):
        plan.update(reps=5)
    with pytest.raises(KeyError, match="family"):
        plan["family"]


def test_plan_id_and_pickle():
    plan = make_plan({"seed": 3})
    assert len(plan.id) == 12
    assert plan.id == make_plan({"seed": 3}).id
    assert plan.id != make_plan({"seed": 4}).id
    copy = pickle.loads(pickle.dumps(plan))
    assert isinstance(copy, ExperimentPlan)
    assert copy == plan
    assert copy.id == plan.id


def test_load_plan_text(tmp_path):
    path = tmp_path / "plan.txt"
    path.write_text(
        dedent(
            """
            population = normal-quantile
            sizes = 20, 40
            regimes = half
            reps = 500
            epsilons = 0.1, 1
            """
        )
    )
    plan = load_plan(path)
    assert plan["sizes"] == [20, 40]
    assert plan["epsilons"] == [0.1, 1.0]
    assert plan.pairs() == [(20, 10), (40, 20)]

    plan = load_plan(path, {"reps": 800, "seed": None})
    assert plan["reps"] == 800
    assert plan["seed"] == 0


def test_load_plan_yaml(tmp_path):
    path = tmp_path / "plan.yml"
    path.write_text("population: two-point:0,1,0.2\nfamily: ['30:5']\n")
    plan = load_plan(path, {"weights": "gini"})
    assert plan["weights"] == "gini"
    assert plan.pairs() == [(30, 5)]


def test_load_plan_datadir(datadir):
    plan = load_plan(datadir / "plan.yml")
    assert plan["seed"] == 12345
    assert plan["sigma-source"] == "mc"
    assert plan.pairs() == [(30, 15), (30, 7), (60, 30), (60, 11)]
