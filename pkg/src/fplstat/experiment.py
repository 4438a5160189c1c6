# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Convergence studies: one CSV row per (N, n) pair of an experiment plan.

Rows are computed independently, possibly in worker processes, and written in
plan order. Wall-clock runtimes go to the run log only, so the CSV for a given
plan is byte-identical from run to run.
"""

import csv
import logging
import math
import sys
import time
from functools import partial

from . import __version__
from .diagnostics import condition_report, theorem2_growth
from .errors import FplstatError
from .generators import population_from_descriptor
from .lstat import g1_table
from .montecarlo import ks_normality, mean_estimate, s_r1_replicates
from .population import smoothness_profile
from .sampling import RngSpec
from .util.parallel import ordered_map
from .weights import parse_weights

logger = logging.getLogger(__name__)

# "auto" uses exact sigma when at most this many samples exist
AUTO_EXACT_LIMIT = 10**5


def _label(value):
    return f"{value:g}"


def csv_columns(plan):
    columns = [
        "plan_id",
        "version",
        "seed",
        "N",
        "n",
        "population",
        "weights",
        "status",
        "error",
        "ks",
        "sigma",
        "sigma_source",
        "sigma_std_error",
        "sigma1_sq",
        "mc_r1_sq",
        "mc_r1_sq_std_error",
    ]
    columns += [f"er_g1_{_label(e)}" for e in plan["epsilons"]]
    columns += [f"lindeberg_{_label(e)}" for e in plan["epsilons"]]
    columns += [f"c_min_{_label(d)}" for d in plan["deltas"]]
    columns += [f"growth_{_label(d)}" for d in plan["deltas"]]
    return columns


def resolve_sigma_source(source, N, n):
    if source == "auto":
        return "exact" if math.comb(N, n) <= AUTO_EXACT_LIMIT else "mc"
    return source


def run_row(plan, pair):
    """Compute one row of the study. Failures are reported in the row."""
    N, n = pair
    row = {
        "plan_id": plan.id,
        "version": __version__,
        "seed": plan["seed"],
        "N": N,
        "n": n,
        "population": plan["population"],
        "weights": plan["weights"],
    }
    start = time.monotonic()
    try:
        p = population_from_descriptor(plan["population"], N)
        w = parse_weights(plan["weights"], n)
        rng = RngSpec(plan["seed"])
        decomposition = g1_table(p, w, n)
        s_values, r1_values = s_r1_replicates(
            p, w, n, plan["reps"], rng, decomposition=decomposition, max_workers=1
        )
        normality = ks_normality(
            p,
            w,
            n,
            plan["reps"],
            rng,
            sigma_source=resolve_sigma_source(plan["sigma-source"], N, n),
            replicates=s_values,
        )
        r1 = mean_estimate(r1_values**2, rng)
        conditions = condition_report(p, w, n, plan["epsilons"], decomposition)
    except Exception as e:
        if not isinstance(e, FplstatError):
            logger.exception(f"row N = {N}, n = {n} failed unexpectedly")
        logger.error(f"row N = {N}, n = {n} aborted: {e}")
        row.update(status="error", error=str(e).splitlines()[0])
        return row

    row.update(
        status="ok",
        error="",
        ks=normality.ks_distance,
        sigma=normality.sigma,
        sigma_source=normality.sigma_source,
        sigma_std_error=normality.sigma_std_error,
        sigma1_sq=decomposition.sigma1_sq,
        mc_r1_sq=r1.value,
        mc_r1_sq_std_error=r1.std_error,
    )
    for e in plan["epsilons"]:
        row[f"er_g1_{_label(e)}"] = conditions.er_g1[e]
        row[f"lindeberg_{_label(e)}"] = conditions.lindeberg_g1[e]
    for d in plan["deltas"]:
        row[f"c_min_{_label(d)}"] = smoothness_profile(p, d).c_min
        row[f"growth_{_label(d)}"] = theorem2_growth(N, n, d)
    logger.info(
        f"row N = {N}, n = {n}: ks {normality.ks_distance:.5f} "
        f"in {time.monotonic() - start:.2f}s"
    )
    return row


def run_convergence_study(plan, max_workers=None):
    """Run every (N, n) row of the plan and return the rows in plan order."""
    pairs = plan.pairs()
    logger.info(f"running plan {plan.id}: {len(pairs)} row(s), {plan['reps']} reps each")
    return ordered_map(partial(run_row, plan), pairs, max_workers)


def _format(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_csv(plan, rows, out=None):
    """Write study rows to ``out`` (a path) or stdout."""
    columns = csv_columns(plan)
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: _format(row.get(c)) for c in columns})
    finally:
        if out:
            fh.close()
