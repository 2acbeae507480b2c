"""
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at
      http://www.apache.org/licenses/LICENSE-2.0
 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.

Command-line front end.

    mdsp run --problem matching-pennies --method omd --step const:0.5 --iters 500 --start 0.9,0.5
    mdsp check out/matching-pennies_omd_seed0.csv --claims MonotoneDescent PerStepDescentInequality
    mdsp probe --problem scc-quadratic
    mdsp portrait --problem portrait --methods md omd --start 0.45,0.6 --step const:0.1
    mdsp list-problems

Exit codes: 0 success, 1 failed claims, 2 configuration or parse errors, 3 numerical aborts.
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import jsonschema
import numpy as np
from texttable import Texttable

from mdsp.adaptive.optimizers import ADAPTIVE_OPTIMIZERS, AdamHyperparams
from mdsp.adaptive.problems import ADAPTIVE_PROBLEMS
from mdsp.adaptive.runner import run_adaptive
from mdsp.config import MDSPConfig
from mdsp.diagnostics import run_checks
from mdsp.errors import ConfigError, MDSPError, NonFiniteInput, RecordFormatError
from mdsp.mdsp_logger import logger, progress_enabled, set_log_level
from mdsp.oracle import OracleConfig
from mdsp.problems.base import SamplingPlan
from mdsp.problems.builtin import PROBLEMS, get_problem
from mdsp.problems.probe import coherence_probe
from mdsp.record_io import read_record, write_record
from mdsp.solver.algo import SOLVERS, RunConfig, run
from mdsp.solver.ensemble import run_ensemble
from mdsp.version import __version__

EXIT_OK = 0
EXIT_CLAIMS_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ABORT = 3


def parse_point(value) -> np.ndarray:
    if isinstance(value, str):
        try:
            return np.array([float(v) for v in value.split(",")], dtype=np.float64)
        except ValueError:
            raise ConfigError("Cannot parse point '{}', expected comma-separated numbers".format(value))
    return np.asarray(value, dtype=np.float64)


def parse_param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected key=value, got '{}'".format(text))
    try:
        return key.strip(), json.loads(value)
    except ValueError:
        return key.strip(), value


def _add_run_options(parser):
    parser.add_argument("--config", help="JSON or key=value config file; flags override it")
    parser.add_argument("--problem", help="Builtin problem label")
    parser.add_argument("--param", dest="problem_params", action="append", type=parse_param, metavar="KEY=VALUE",
                        help="Keyword argument of the problem factory (repeatable)")
    parser.add_argument("--step", help="Step-size schedule, e.g. const:0.1 or power:c=1,p=1")
    parser.add_argument("--geometry", choices=["euclidean", "entropic", "auto"])
    parser.add_argument("--sigma", type=float, help="Gradient noise standard deviation")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--iters", dest="iterations", type=int)
    parser.add_argument("--record-every", dest="record_every", type=int)
    parser.add_argument("--out", help="Output directory")


def get_argument_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdsp", description="Mirror descent solvers for saddle-point problems")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log per-iteration detail")
    verbosity.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    subparsers = parser.add_subparsers(dest="command")

    run_parser = subparsers.add_parser("run", help="Run a solver and write its trajectory")
    _add_run_options(run_parser)
    run_parser.add_argument("--method", choices=SOLVERS.names() + ADAPTIVE_OPTIMIZERS.names())
    run_parser.add_argument("--start", dest="initial_point", help="Initial point, e.g. 0.9,0.5")
    run_parser.add_argument("--ensemble", type=int, help="Number of independently seeded runs")
    run_parser.add_argument("--workers", type=int, help="Worker processes for ensembles (0: all cores)")
    run_parser.add_argument("--assert", dest="assert", nargs="+", metavar="CLAIM",
                            help="Claims to check after the run")
    run_parser.add_argument("--beta1", type=float)
    run_parser.add_argument("--beta2", type=float)
    run_parser.add_argument("--eps", type=float)
    run_parser.add_argument("--lr", type=float)
    run_parser.add_argument("--lr2", type=float)
    run_parser.add_argument("--paper-literal", dest="paper_literal", action="store_const", const=True)
    run_parser.add_argument("--threshold", type=float, help="Convergence threshold for ensemble claims")
    run_parser.add_argument("--required-fraction", dest="required_fraction", type=float)
    run_parser.add_argument("--ergodic-radius", dest="ergodic_radius", type=float)
    run_parser.add_argument("--alpha", type=float, help="Strong convexity modulus; defaults to the geometry's")
    run_parser.add_argument("--lipschitz", type=float, help="Defaults to the problem's Lipschitz constant")
    run_parser.add_argument("--m2", dest="m_squared", type=float, help="Bound on E||g||^2 for BoundedOrbit")

    check_parser = subparsers.add_parser("check", help="Check claims on stored trajectories")
    check_parser.add_argument("records", nargs="+", help="Trajectory CSV files (JSON sidecars next to them)")
    check_parser.add_argument("--claims", nargs="+", required=True)
    check_parser.add_argument("--alpha", type=float)
    check_parser.add_argument("--lipschitz", type=float)
    check_parser.add_argument("--m2", dest="m_squared", type=float)
    check_parser.add_argument("--schedule", help="Schedule for BoundedOrbit; defaults to the recorded one")
    check_parser.add_argument("--threshold", type=float)
    check_parser.add_argument("--required-fraction", dest="required_fraction", type=float)
    check_parser.add_argument("--ergodic-radius", dest="ergodic_radius", type=float)
    check_parser.add_argument("--report", help="Where to write the report JSON")

    probe_parser = subparsers.add_parser("probe", help="Classify the VI residual of a problem")
    probe_parser.add_argument("--config")
    probe_parser.add_argument("--problem")
    probe_parser.add_argument("--param", dest="problem_params", action="append", type=parse_param,
                              metavar="KEY=VALUE")
    probe_parser.add_argument("--grid", type=int, help="Grid points per axis (box sets only)")
    probe_parser.add_argument("--samples", type=int)
    probe_parser.add_argument("--seed", type=int)
    probe_parser.add_argument("--out")

    portrait_parser = subparsers.add_parser("portrait", help="Trajectories from several starts for phase portraits")
    _add_run_options(portrait_parser)
    portrait_parser.add_argument("--methods", nargs="+", choices=SOLVERS.names())
    portrait_parser.add_argument("--start", dest="starts", action="append", help="Initial point (repeatable)")

    subparsers.add_parser("list-problems", help="List builtin problems")
    return parser


def _load_config(args, keys) -> MDSPConfig:
    base = MDSPConfig.from_file(args.config) if getattr(args, "config", None) else MDSPConfig()
    overrides = {k: getattr(args, k, None) for k in keys}
    if overrides.get("problem_params") is not None:
        params = dict(base.get("problem_params", {}))
        params.update(dict(overrides["problem_params"]))
        overrides["problem_params"] = params
    return base.merged(overrides).with_defaults()


def _problem_params(config) -> dict:
    params = config.get("problem_params") or {}
    return params.to_dict() if hasattr(params, "to_dict") else dict(params)


def _resolve_problem(config):
    try:
        return get_problem(config.problem, **_problem_params(config))
    except KeyError as e:
        raise ConfigError(str(e))
    except TypeError as e:
        raise ConfigError("Bad parameters for problem {}: {}".format(config.problem, e))


def _record_stem(problem: str, method: str, seed: int, run_index: Optional[int] = None) -> str:
    stem = "{}_{}_seed{}".format(problem, method, seed)
    return stem if run_index is None else "{}_run{:03d}".format(stem, run_index)


def _summary(record) -> str:
    distances = ", ".join("{:.6e}".format(d) for d in record.final_distances())
    status = "" if record.complete else " [aborted: {}]".format(record.abort_reason)
    return "{} on {}: {} iterations, final D = [{}], queries = {}{}".format(
        record.method, record.problem_label, record.iterations, distances,
        record.final.queries if record.final else 0, status)


def _report_claims(records, names, claims, constants, report_path) -> int:
    report = run_checks(records, claims, constants, names)
    print(report.draw())
    directory = os.path.dirname(report_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(report_path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2)
        f.write("\n")
    return EXIT_OK if report.all_passed else EXIT_CLAIMS_FAILED


CLAIM_CONSTANTS = ["alpha", "lipschitz", "m_squared", "threshold", "required_fraction", "ergodic_radius"]


def _claim_constants(config) -> dict:
    """Constants given in the config or on the command line; the rest fall back to the record."""
    return {k: config[k] for k in CLAIM_CONSTANTS if config.get(k) is not None}


RUN_KEYS = ["problem", "problem_params", "method", "step", "geometry", "sigma", "seed", "iterations", "record_every",
            "out", "initial_point", "ensemble", "workers", "assert", "beta1", "beta2", "eps", "lr", "lr2",
            "paper_literal"] + CLAIM_CONSTANTS


def cmd_run(args) -> int:
    config = _load_config(args, RUN_KEYS)
    if not config.get("problem") or not config.get("method"):
        raise ConfigError("both --problem and --method are required")
    config = config.as_attr_dict()
    start = None if not config.initial_point else parse_point(config.initial_point)

    if config.method in ADAPTIVE_OPTIMIZERS:
        if config.problem not in ADAPTIVE_PROBLEMS:
            raise ConfigError("{} needs an unconstrained problem: {}".format(config.method,
                                                                             ", ".join(ADAPTIVE_PROBLEMS.names())))
        hyperparams = AdamHyperparams(config.beta1, config.beta2, config.eps, config.lr,
                                      config.lr2 if config.lr2 else None, bool(config.paper_literal))
        records = [run_adaptive(config.problem, config.method, hyperparams, config.iterations, config.seed + i,
                                config.sigma, start, config.record_every) for i in range(config.ensemble)]
    else:
        problem = _resolve_problem(config)
        run_config = RunConfig(config.problem, config.geometry, config.step,
                               OracleConfig.from_sigma(config.sigma, config.seed), config.iterations, start,
                               config.record_every, _problem_params(config))
        if config.ensemble > 1:
            records = run_ensemble(run_config, config.method, config.ensemble, config.workers,
                                   progress=progress_enabled())
        else:
            records = [run(run_config.with_problem(problem), config.method)]

    names = []
    for i, record in enumerate(records):
        stem = _record_stem(config.problem, config.method, config.seed, i if len(records) > 1 else None)
        csv_path, _ = write_record(record, os.path.join(config.out, stem + ".csv"))
        names.append(csv_path)
        print(_summary(record))

    exit_code = EXIT_OK
    if config["assert"]:
        report_path = os.path.join(config.out, _record_stem(config.problem, config.method, config.seed) + ".report.json")
        exit_code = _report_claims(records, names, config["assert"], _claim_constants(config), report_path)
    if any(not r.complete for r in records):
        return EXIT_NUMERICAL_ABORT
    return exit_code


def cmd_check(args) -> int:
    records = [read_record(path) for path in args.records]
    constants = _claim_constants(vars(args))
    if args.schedule:
        constants["schedule"] = args.schedule
    report_path = args.report or os.path.splitext(args.records[0])[0] + ".report.json"
    return _report_claims(records, args.records, args.claims, constants, report_path)


def cmd_probe(args) -> int:
    config = _load_config(args, ["problem", "problem_params", "grid", "samples", "seed", "out"])
    if not config.get("problem"):
        raise ConfigError("--problem is required")
    config = config.as_attr_dict()
    problem = _resolve_problem(config)
    plan = problem.sampling_plan
    if config.grid:
        plan = SamplingPlan(SamplingPlan.GRID, grid_points=config.grid, seed=config.seed)
    elif config.samples:
        plan = SamplingPlan(SamplingPlan.RANDOM, samples=config.samples, seed=config.seed)
    report = coherence_probe(problem, plan)

    table = Texttable()
    data = [["Solution", "min", "max", "mean", "max |r|"]]
    for s in report.per_solution:
        data.append([str(np.round(s.solution, 6).tolist()), s.min, s.max, s.mean, s.max_abs])
    table.add_rows(data)
    print(table.draw())
    print(report.summary())

    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, "{}.probe.json".format(problem.label))
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2)
        f.write("\n")
    if not report.matches_declared:
        logger.warning("Probe classification {} does not refine the declared class {}".format(
            report.classification.value, report.declared.value))
    return EXIT_OK


PORTRAIT_TITLES = {
    "portrait": "Spiral portrait: MD iterates drift away from the critical point, OMD iterates converge to it",
    "matching-pennies": "Matching pennies: the MD orbit grows around the equilibrium, the OMD orbit shrinks onto it",
}


def portrait_title(label: str) -> str:
    return PORTRAIT_TITLES.get(label, "Phase portrait of MD and OMD trajectories on {}".format(label))


def cmd_portrait(args) -> int:
    config = _load_config(args, ["problem", "problem_params", "step", "geometry", "sigma", "seed", "iterations",
                                 "record_every", "out", "methods", "starts"])
    if not config.get("problem"):
        raise ConfigError("--problem is required")
    config = config.as_attr_dict()
    problem = _resolve_problem(config)
    if problem.dim != 2:
        raise ConfigError("Phase portraits need a 2-dimensional problem, {} has dimension {}".format(
            problem.label, problem.dim))
    starts = [parse_point(s) for s in config.starts] if config.starts else [problem.set.center()]
    aborted = False
    for method in config.methods:
        for k, start in enumerate(starts):
            run_config = RunConfig(problem, config.geometry, config.step,
                                   OracleConfig.from_sigma(config.sigma, config.seed), config.iterations, start,
                                   config.record_every)
            record = run(run_config, method)
            record.metadata["portrait"] = {"title": portrait_title(problem.label),
                                           "start_index": k, "start": start.tolist()}
            write_record(record, os.path.join(config.out, "{}_{}_start{}.csv".format(problem.label, method, k)))
            print(_summary(record))
            aborted = aborted or not record.complete
    return EXIT_NUMERICAL_ABORT if aborted else EXIT_OK


def cmd_list_problems(args) -> int:
    table = Texttable(max_width=120)
    data = [["Label", "Kind", "Dim", "Class", "L", "Description"]]
    for label in PROBLEMS.names():
        problem = get_problem(label)
        lipschitz = "" if problem.lipschitz is None else "{:.4g}".format(problem.lipschitz)
        data.append([label, "constrained", problem.dim, problem.coherence_class.value, lipschitz,
                     problem.description])
    for label in ADAPTIVE_PROBLEMS.names():
        problem = ADAPTIVE_PROBLEMS.get(label)()
        data.append([label, "unconstrained", problem.dim, "", "", ADAPTIVE_PROBLEMS.summary(label)])
    table.add_rows(data)
    print(table.draw())
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "check": cmd_check,
    "probe": cmd_probe,
    "portrait": cmd_portrait,
    "list-problems": cmd_list_problems,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = get_argument_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    if args.verbose:
        set_log_level(logging.DEBUG)
    elif args.quiet:
        set_log_level(logging.WARNING)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG_ERROR

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, RecordFormatError, jsonschema.ValidationError) as e:
        print("error: {}".format(e), file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG_ERROR
    except NonFiniteInput as e:
        print("numerical abort: {}".format(e), file=sys.stderr)
        return EXIT_NUMERICAL_ABORT
    except MDSPError as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_CONFIG_ERROR
