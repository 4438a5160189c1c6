# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

import argparse
import csv
import logging
import os
import sys
import traceback
from collections import namedtuple
from contextlib import contextmanager

import appdirs

from .errors import DomainError, PlanValidationError, ResourceGuardError

logger = logging.getLogger(__name__)

Command = namedtuple("Command", ["func", "args", "kwargs", "defaults"])
commands = {}

EXIT_CODES = (
    (PlanValidationError, 2),
    (ResourceGuardError, 3),
    (DomainError, 4),
)


def command(*args, **kwargs):
    defaults = kwargs.pop("defaults", {})

    def decorator(func):
        commands[args[0]] = Command(func, args, kwargs, defaults)
        return func

    return decorator


def argument(*args, **kwargs):
    def decorator(func):
        if not hasattr(func, "args"):
            func.args = []
        func.args.append((args, kwargs))
        return func

    return decorator


def logging_arguments(func):
    func = argument("--quiet", "-q", action="store_true", help="only log warnings and errors")(func)
    func = argument(
        "--verbose", "-v", action="store_true", help="include debug-level logging output"
    )(func)
    return func


def population_arguments(func):
    func = argument("--pop", help="population file, one value per line")(func)
    func = argument(
        "--gen",
        help="generated population, e.g. `equispaced` or `two-point:0,1,0.1` "
        "(see `fplstat generate --help`)",
    )(func)
    func = argument("--size", "-N", type=int, help="population size for --gen")(func)
    return func


def statistic_arguments(func):
    func = argument("--n", type=int, required=True, help="sample size")(func)
    func = argument(
        "--weights",
        default="mean",
        help="weights: mean, identity, gini, trimmed:t1,t2, trimmed-j:t1,t2 or "
        "file:PATH (default: mean)",
    )(func)
    return func


def parse_float_list(text, name):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise PlanValidationError(f"--{name} expects comma-separated numbers, got {text!r}")


def seed_value(text):
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}")
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def apply_verbosity(options):
    if options.get("verbose"):
        logging.root.setLevel(logging.DEBUG)
    elif options.get("quiet"):
        logging.root.setLevel(logging.WARNING)


def load_input_population(options):
    from .generators import population_from_descriptor
    from .population import load_population

    if options.get("pop") and options.get("gen"):
        raise PlanValidationError("give either --pop or --gen, not both")
    if options.get("pop"):
        return load_population(options["pop"])
    if options.get("gen"):
        if options.get("size") is None and not options["gen"].startswith("from-file:"):
            raise PlanValidationError("--gen needs a population size (--size)")
        return population_from_descriptor(options["gen"], options.get("size"))
    raise PlanValidationError("one of --pop or --gen is required")


@contextmanager
def output_stream(path):
    if path:
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


@command("compute", help="Evaluate L_n (and S_n, given a population) for one sample.")
@logging_arguments
@population_arguments
@argument("--sample", required=True, help="sample file, one value per line")
@argument(
    "--weights",
    default="mean",
    help="weights descriptor (default: mean); see `fplstat diagnose --help`",
)
def compute(options):
    from .lstat import expected_l, l_statistic, s_statistic
    from .util.readers import read_values
    from .weights import parse_weights

    apply_verbosity(options)
    sample = read_values(options["sample"])
    w = parse_weights(options["weights"], len(sample))
    print(f"L = {_fmt(l_statistic(w, sample))}")
    if options.get("pop") or options.get("gen"):
        p = load_input_population(options)
        expected = expected_l(p, w, len(sample))
        ev = s_statistic(p, w, len(sample), sample, expected=expected)
        print(f"E L = {_fmt(expected)}")
        print(f"S = {_fmt(ev.S)}")
    return 0


@command(
    "diagnose",
    help="Report the normal-approximation conditions and bounds for one (N, n).",
)
@logging_arguments
@population_arguments
@statistic_arguments
@argument("--epsilons", default=None, help="comma-separated epsilon grid")
@argument("--deltas", default=None, help="comma-separated delta grid in (1/2, 1]")
@argument("--out", "-o", default=None, help="CSV output path (default: stdout)")
def diagnose(options):
    from .diagnostics import DEFAULT_DELTAS, DEFAULT_EPSILONS, report_rows, theorem1_report
    from .weights import parse_weights

    apply_verbosity(options)
    p = load_input_population(options)
    n = options["n"]
    w = parse_weights(options["weights"], n)
    epsilons = DEFAULT_EPSILONS
    if options["epsilons"]:
        epsilons = parse_float_list(options["epsilons"], "epsilons")
    deltas = DEFAULT_DELTAS
    if options["deltas"]:
        deltas = parse_float_list(options["deltas"], "deltas")
    report = theorem1_report(p, w, n, deltas=deltas, epsilons=epsilons)

    cond = report.conditions
    with output_stream(options["out"]) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["grid", "value", "quantity", "result"])
        for grid, value, quantity, result in report_rows(report):
            writer.writerow([grid, _fmt(value), quantity, _fmt(result)])

    print(
        f"N = {p.N}, n = {n}, n_* = {cond.n_star}, tau = {cond.tau:.6g}, "
        f"sigma1^2 = {cond.sigma1_sq:.6g}, a = {report.sup_bound_a:.6g}, "
        f"E X^2 = {report.second_moment:.6g}, sigma_tilde = {report.sigma_tilde} "
        f"({report.sigma_source or 'not computed'})",
        file=sys.stderr,
    )
    flags = ", ".join(f"{k} = {v}" for k, v in report.flags.items())
    print(flags, file=sys.stderr)
    return 0


@command("oracle", help="Enumerate every sample: exact law and moments of S_n.")
@logging_arguments
@population_arguments
@statistic_arguments
@argument("--out", "-o", default=None, help="CSV path for the atoms (default: stdout)")
def oracle(options):
    from .oracle import (
        enumerate_distribution,
        exact_d1_moment,
        exact_delta2,
        exact_linear_moments,
    )
    from .weights import parse_weights

    apply_verbosity(options)
    p = load_input_population(options)
    n = options["n"]
    w = parse_weights(options["weights"], n)
    dist = enumerate_distribution(p, w, n)
    with output_stream(options["out"]) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["s", "probability"])
        for s, prob in dist.atoms:
            writer.writerow([_fmt(s), str(prob)])

    mean_u, cov, r1_sq = exact_linear_moments(p, w, n)
    summary = [
        ("expected_l", dist.expected_l),
        ("var_s", dist.var_s),
        ("e_u1", mean_u),
        ("cov_u1_r1", cov),
        ("e_r1_sq", r1_sq),
        ("e_d1_sq", exact_d1_moment(p, w, n)),
    ]
    if 2 <= n <= p.N - 2:
        summary.append(("delta2", exact_delta2(p, w, n)))
    if dist.var_s > 0:
        summary.append(("ks", dist.ks_distance()))
    for name, value in summary:
        print(f"{name} = {_fmt(value)}", file=sys.stderr)
    return 0


@command("mc", help="Monte Carlo estimates and the KS distance of S_n / sigma to N(0, 1).")
@logging_arguments
@population_arguments
@statistic_arguments
@argument("--reps", type=int, default=10000, help="number of replicates")
@argument("--seed", type=seed_value, default=0, help="unsigned 64-bit seed")
@argument(
    "--sigma-source",
    choices=("exact", "mc", "user"),
    default="mc",
    help="where sigma comes from (default: mc)",
)
@argument("--sigma", type=float, default=None, help="sigma for --sigma-source user")
@argument("--max-workers", "-j", type=int, default=None, help="worker processes")
@argument("--dump-replicates", default=None, help="write every S_n replicate to this CSV")
def mc(options):
    from .montecarlo import ks_normality, mc_d1_moment, mc_delta2, s_replicates, variance_estimate
    from .sampling import RngSpec
    from .weights import parse_weights

    apply_verbosity(options)
    p = load_input_population(options)
    n = options["n"]
    w = parse_weights(options["weights"], n)
    rng = RngSpec(options["seed"])
    workers = options["max_workers"]

    values = s_replicates(p, w, n, options["reps"], rng, workers)
    if options["dump_replicates"]:
        with output_stream(options["dump_replicates"]) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["stream", "s"])
            for stream, s in enumerate(values):
                writer.writerow([stream, _fmt(s)])

    var = variance_estimate(values, rng)
    print(f"var_s = {_fmt(var.value)} +- {_fmt(var.std_error)}")
    d1 = mc_d1_moment(p, w, n, options["reps"], rng, workers)
    print(f"e_d1_sq = {_fmt(d1.value)} +- {_fmt(d1.std_error)}")
    if 2 <= n <= p.N - 2:
        d2 = mc_delta2(p, w, n, options["reps"], rng, workers)
        print(f"delta2 = {_fmt(d2.value)} +- {_fmt(d2.std_error)}")
    report = ks_normality(
        p,
        w,
        n,
        options["reps"],
        rng,
        sigma_source=options["sigma_source"],
        sigma=options["sigma"],
        replicates=values,
    )
    print(f"ks = {_fmt(report.ks_distance)} (sigma {_fmt(report.sigma)}, {report.sigma_source})")
    return 0


def attach_run_log(path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    handler = logging.FileHandler(path, mode="w")
    if logging.root.handlers:
        handler.setFormatter(logging.root.handlers[0].formatter)
    logging.root.addHandler(handler)
    return handler


@command("experiment", help="Run a convergence study over the (N, n) rows of a plan.")
@logging_arguments
@argument("--plan", "-p", default=None, help="plan file (.yml, .yaml or key = value text)")
@argument("--gen", dest="population", default=None, help="population descriptor override")
@argument("--weights", default=None, help="weights descriptor override")
@argument("--reps", type=int, default=None, help="replicates per row override")
@argument("--seed", type=seed_value, default=None, help="seed override")
@argument("--epsilons", default=None, help="epsilon grid override")
@argument("--deltas", default=None, help="delta grid override")
@argument(
    "--sigma-source", choices=("auto", "exact", "mc"), default=None, help="sigma source override"
)
@argument("--out", "-o", default=None, help="CSV output path (default: the plan's out, else stdout)")
@argument("--max-workers", "-j", type=int, default=None, help="rows computed in parallel")
@argument(
    "--log-file",
    default=None,
    help="run log path (default: <user log dir>/fplstat/<plan id>.log)",
)
def experiment(options):
    from .experiment import run_convergence_study, write_csv
    from .plan import load_plan

    apply_verbosity(options)
    overrides = {
        "population": options["population"],
        "weights": options["weights"],
        "reps": options["reps"],
        "seed": options["seed"],
        "epsilons": options["epsilons"],
        "deltas": options["deltas"],
        "sigma-source": options["sigma_source"],
        "out": options["out"],
    }
    plan = load_plan(options["plan"], overrides)
    log_file = options["log_file"] or os.path.join(
        appdirs.user_log_dir("fplstat"), f"{plan.id}.log"
    )
    handler = attach_run_log(log_file)
    try:
        logger.info(f"plan {plan.id}: {dict(plan)}")
        rows = run_convergence_study(plan, options["max_workers"])
        write_csv(plan, rows, plan.get("out"))
    finally:
        logging.root.removeHandler(handler)
        handler.close()
    failed = sum(1 for row in rows if row["status"] != "ok")
    if failed:
        logger.warning(f"{failed} row(s) failed, see {log_file}")
    return 0


@command("generate", help="Write a generated population to a file.")
@logging_arguments
@argument(
    "--gen",
    required=True,
    help="equispaced, uniform-quantile, normal-quantile, exponential-quantile, "
    "pareto-quantile:ALPHA, two-point:LOW,HIGH,SPLIT or from-file:PATH",
)
@argument("--size", "-N", type=int, default=None, help="population size")
@argument("--out", "-o", default=None, help="output path (default: stdout)")
def generate(options):
    from .generators import population_from_descriptor

    apply_verbosity(options)
    p = population_from_descriptor(options["gen"], options["size"])
    with output_stream(options["out"]) as fh:
        for x in p.values:
            fh.write(f"{_fmt(x)}\n")
    return 0


def create_parser():
    parser = argparse.ArgumentParser(
        description="Finite population L-statistics under sampling without replacement"
    )
    subparsers = parser.add_subparsers()
    for _, (func, args, kwargs, defaults) in commands.items():
        subparser = subparsers.add_parser(*args, **kwargs)
        for arg in func.args:
            subparser.add_argument(*arg[0], **arg[1])
        subparser.set_defaults(command=func, **defaults)
    return parser


def setup_logging():
    logging.basicConfig(
        format="%(asctime)s - %(levelname)s - %(message)s", level=logging.INFO
    )


def main(args=sys.argv[1:]):
    setup_logging()
    parser = create_parser()

    if not args:
        parser.print_help()
        sys.exit(1)

    args = parser.parse_args(args)
    try:
        return args.command(vars(args))
    except Exception as e:
        for cls, code in EXIT_CODES:
            if isinstance(e, cls):
                print(f"error: {e}", file=sys.stderr)
                sys.exit(code)
        traceback.print_exc()
        sys.exit(1)
