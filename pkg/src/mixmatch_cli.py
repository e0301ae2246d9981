import argparse
import os
import sys

from loguru import logger

from engine_utils.directory_info import DirectoryInfo
from engine_utils.time_utils import timeit
from mixmatch.baselines.baseline_kind import BaselineKind
from mixmatch.baselines.baseline_runner import run_baseline
from mixmatch.common.csv_output import write_csv
from mixmatch.common.mixmatch_errors import AcceptanceViolation, MixMatchError
from mixmatch.data_models.search_config_data import SearchConfigModel
from mixmatch.harness.experiment import run_experiment
from mixmatch.harness.ingest import ingest_csv_with_splits, write_ingest_splits
from mixmatch.harness.regret import regret_if_known
from mixmatch.harness.verification import (VERIFY_SGD_HEADER, VERIFY_SMOOTHNESS_HEADER, verify_concentration,
                                           verify_smoothness)
from mixmatch.problems.suite_builder import write_suite_manifest
from mixmatch.sgd.step_schedule import parse_schedule_config, schedule_from_config
from mixmatch.simplex.partition_strategy import PartitionKind, PartitionStrategy
from mixmatch.simplex.simplex_cell import cell_diameter, diameter_bound, iterate_partition
from mixmatch.treesearch.mix_and_match import SearchResult, run_search
from runner.runner_data_models.logger_config_data import LoggerConfigData
from runner.runner_utils.logger_utils import config_loggers
from runner.runner_utils.runner_config_loader import (load_config_file, load_experiment_config, load_ingest_spec,
                                                      load_problem_suite, load_section, load_verify_config)

project_dir = DirectoryInfo.get_project_dir()
if project_dir not in sys.path:
    sys.path.insert(0, project_dir)

SEARCH_LOG_HEADER = ("order", "height", "index", "alpha_json", "steps", "val_loss", "b_value")
RESULT_HEADER = ("alpha_json", "height", "total_steps", "regret_if_known")
PARTITION_HEADER = ("height", "index", "diameter_l1", "bound", "vertex_json")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ACCEPTANCE = 2


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog="mixmatch")
    parser.add_argument("--env", type=str, default="default", help="environment to use in config files")
    parser.add_argument("--log-level", type=str, default=None, help="overrides the configured log level")
    parser.add_argument("--log-file", type=str, default=None, help="also log to this file")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="run Mix&Match on a suite")
    run_parser.add_argument("--suite", type=str, required=True, help="suite config file")
    run_parser.add_argument("--budget", type=int, default=None, help="total SGD step budget Lambda")
    run_parser.add_argument("--node-steps", type=int, default=None, help="SGD steps per node lambda")
    run_parser.add_argument("--strategy", type=str, default=None, help="bisect or coordhalf")
    run_parser.add_argument("--schedule", type=str, default=None, help="theoretical[:E] or practical:<eta>")
    run_parser.add_argument("--selection-pool", type=str, default=None, help="literal or leaves")
    run_parser.add_argument("--refine", type=float, default=None,
                            help="spend half the budget refining the chosen model at this step scale")
    run_parser.add_argument("--seed", type=int, default=None)
    run_parser.add_argument("--out", type=str, default=None, help="output directory; result.csv to stdout if omitted")

    baseline_parser = subparsers.add_parser("baseline", help="run a fixed-mixture baseline")
    baseline_parser.add_argument("--kind", type=str, required=True, help="genie, uniform, validation or only:<i>")
    baseline_parser.add_argument("--suite", type=str, required=True)
    baseline_parser.add_argument("--budget", type=int, default=None)
    baseline_parser.add_argument("--schedule", type=str, default=None)
    baseline_parser.add_argument("--seed", type=int, default=None)
    baseline_parser.add_argument("--out", type=str, default=None)

    sgd_parser = subparsers.add_parser("verify-sgd", help="check SGD iterates against the concentration bound")
    sgd_parser.add_argument("--suite", type=str, required=True)
    sgd_parser.add_argument("--config", type=str, default=None,
                            help="file with a verify section; defaults to the suite file")
    sgd_parser.add_argument("--t", type=int, default=None, help="SGD steps T")
    sgd_parser.add_argument("--lambda", dest="budget", type=float, default=None, help="budget Lambda, at least T+1")
    sgd_parser.add_argument("--replicas", type=int, default=None)
    sgd_parser.add_argument("--k", type=int, default=None, help="martingale refinement level")
    sgd_parser.add_argument("--offset", type=float, default=None, help="schedule offset E; enables the rate check")
    sgd_parser.add_argument("--seed", type=int, default=None)
    sgd_parser.add_argument("--out", type=str, default=None, help="output CSV file; stdout if omitted")

    smooth_parser = subparsers.add_parser("verify-smoothness", help="check mixture smoothness on random pairs")
    smooth_parser.add_argument("--suite", type=str, required=True)
    smooth_parser.add_argument("--config", type=str, default=None)
    smooth_parser.add_argument("--pairs", type=int, default=None)
    smooth_parser.add_argument("--seed", type=int, default=None)
    smooth_parser.add_argument("--out", type=str, default=None)

    partition_parser = subparsers.add_parser("partition-demo", help="list the cells of a simplex partition")
    partition_parser.add_argument("--k", type=int, required=True)
    partition_parser.add_argument("--height", type=int, required=True)
    partition_parser.add_argument("--strategy", type=str, default="bisect")
    partition_parser.add_argument("--seed", type=int, default=0)
    partition_parser.add_argument("--out", type=str, default=None)

    ingest_parser = subparsers.add_parser("ingest-check", help="ingest a CSV dataset and report its splits")
    ingest_parser.add_argument("--spec", type=str, required=True, help="file with an ingest section")
    ingest_parser.add_argument("--out", type=str, default=None)

    experiment_parser = subparsers.add_parser("experiment", help="run an experiment grid")
    experiment_parser.add_argument("--config", type=str, required=True, help="file with an experiment section")
    experiment_parser.add_argument("--out", type=str, default=None, help="output directory")
    return parser.parse_args(argv)


def _out_file(out_dir, name):
    return None if out_dir is None else os.path.join(out_dir, name)


def _search_config(base: SearchConfigModel, args) -> SearchConfigModel:
    updates = {}
    for field, value in (("budget", args.budget), ("node_steps", getattr(args, "node_steps", None)),
                         ("strategy", getattr(args, "strategy", None)), ("seed", args.seed),
                         ("selection_pool", getattr(args, "selection_pool", None))):
        if value is not None:
            updates[field] = value
    if args.schedule is not None:
        updates["schedule"] = parse_schedule_config(args.schedule, base.schedule)
    return base.model_copy(update=updates)


def _write_result(suite, result: SearchResult, out_dir):
    alpha_json = None if result.chosen_mixture is None else result.chosen_mixture.to_json()
    write_csv(_out_file(out_dir, "result.csv"), RESULT_HEADER,
              [(alpha_json, result.tree_height, result.total_steps, regret_if_known(suite, result))])


@timeit
def command_run(args) -> int:
    suite, search_config = load_problem_suite(args.suite, args.env)
    config = _search_config(search_config, args)
    result = run_search(suite, config, refine_scale=args.refine)
    if args.out is not None:
        write_csv(os.path.join(args.out, "search.csv"), SEARCH_LOG_HEADER,
                  [(entry.order, entry.height, entry.index, entry.alpha.to_json(), entry.steps, entry.val_loss,
                    entry.b_value) for entry in result.audit_log])
        write_suite_manifest(suite, os.path.join(args.out, "suite-manifest.csv"))
    _write_result(suite, result, args.out)
    return EXIT_OK


@timeit
def command_baseline(args) -> int:
    suite, search_config = load_problem_suite(args.suite, args.env)
    config = _search_config(search_config, args)
    schedule = schedule_from_config(config.schedule, suite.constants, config.budget)
    result = run_baseline(BaselineKind.parse(args.kind), suite, config.budget, schedule, seed=config.seed)
    _write_result(suite, result, args.out)
    return EXIT_OK


def _verify_config(args):
    # the suite file may carry its own verify section
    config = load_verify_config(args.config or args.suite, args.env)
    updates = {field: value for field, value in vars(args).items()
               if field in type(config).model_fields and value is not None}
    if getattr(args, "t", None) is not None:
        updates["steps"] = args.t
    return config.model_copy(update=updates)


@timeit
def command_verify_sgd(args) -> int:
    config = _verify_config(args)
    suite, _ = load_problem_suite(args.suite, args.env)
    Lambda = config.budget if config.budget is not None else config.steps + 1
    report = verify_concentration(suite, config.steps, Lambda, config.replicas, k=config.k, seed=config.seed,
                                  E=config.offset)
    write_csv(args.out, VERIFY_SGD_HEADER, [row.csv_row() for row in report.rows])
    if not report.passed:
        raise AcceptanceViolation(f"Concentration check failed: bound_ok={report.bound_ok}, "
                                  f"rate_ok={report.rate_ok}, slope={report.slope!r}")
    return EXIT_OK


@timeit
def command_verify_smoothness(args) -> int:
    config = _verify_config(args)
    suite, _ = load_problem_suite(args.suite, args.env)
    report = verify_smoothness(suite, config.pairs, seed=config.seed)
    write_csv(args.out, VERIFY_SMOOTHNESS_HEADER, [report.csv_row()])
    if not report.passed:
        raise AcceptanceViolation(f"Smoothness check failed: {report.violations_optimum} optimum and "
                                  f"{report.violations_objective} objective violations")
    return EXIT_OK


@timeit
def command_partition_demo(args) -> int:
    strategy = PartitionStrategy.from_name(args.strategy, args.seed)
    # the diameter bound only holds for longest-edge bisection
    checked = strategy.kind == PartitionKind.LONGEST_EDGE_BISECTION
    # K=1 is a single point: only the root row, with no bound
    height = args.height if args.k > 1 else 0
    rows = []
    violations = 0
    for cell in iterate_partition(args.k, height, strategy):
        diameter = cell_diameter(cell)
        bound = diameter_bound(cell.height, args.k) if args.k > 1 else None
        violations += int(checked and bound is not None and diameter > bound)
        rows.append((cell.height, cell.index, diameter, bound, cell.to_json()))
    write_csv(args.out, PARTITION_HEADER, rows)
    if violations:
        raise AcceptanceViolation(f"{violations} cells exceed the diameter bound")
    return EXIT_OK


@timeit
def command_ingest_check(args) -> int:
    _, splits = ingest_csv_with_splits(load_ingest_spec(args.spec, args.env))
    write_ingest_splits(splits, args.out)
    return EXIT_OK


@timeit
def command_experiment(args) -> int:
    config = load_experiment_config(args.config, args.env)
    suite, _ = load_problem_suite(config.suite, args.env)
    report = run_experiment(config, suite, out_dir=args.out)
    failed = sum(r.failed for r in report.reports)
    if failed:
        logger.warning(f"{failed} experiment cells failed")
    return EXIT_OK


COMMANDS = {
    "run": command_run,
    "baseline": command_baseline,
    "verify-sgd": command_verify_sgd,
    "verify-smoothness": command_verify_smoothness,
    "partition-demo": command_partition_demo,
    "ingest-check": command_ingest_check,
    "experiment": command_experiment,
}


def _logger_config(args) -> LoggerConfigData:
    config_path = getattr(args, "suite", None) or getattr(args, "config", None) or getattr(args, "spec", None)
    logger_config = LoggerConfigData()
    if config_path is not None and os.path.isfile(DirectoryInfo.resolve_path(config_path)):
        logger_config = load_section(load_config_file(config_path, args.env), "logger", LoggerConfigData)
    updates = {"log_level": args.log_level, "log_file": args.log_file}
    return logger_config.model_copy(update={k: v for k, v in updates.items() if v is not None})


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        config_loggers(_logger_config(args))
        return COMMANDS[args.command](args)
    except AcceptanceViolation as e:
        logger.error(f"Acceptance check failed: {e}")
        return EXIT_ACCEPTANCE
    except (MixMatchError, OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
