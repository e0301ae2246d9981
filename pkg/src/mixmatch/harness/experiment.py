import os
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import List, Optional

from loguru import logger
from tqdm import tqdm

from engine_utils.random_streams import derive_seed
from mixmatch.baselines.baseline_kind import BaselineKind
from mixmatch.baselines.baseline_runner import run_baseline
from mixmatch.common.csv_output import write_csv
from mixmatch.common.mixmatch_errors import SuiteConfigError
from mixmatch.data_models.experiment_config_data import ExperimentConfigModel
from mixmatch.harness.regret import REGRET_KINDS, result_regret
from mixmatch.harness.regret_report import RegretReport
from mixmatch.problems.problem_suite import ProblemSuite
from mixmatch.problems.suite_operations import is_estimate
from mixmatch.sgd.step_schedule import schedule_from_config
from mixmatch.simplex.partition_strategy import PartitionStrategy
from mixmatch.treesearch.mix_and_match import SearchResult, mix_and_match, mix_and_match_refined

REGRET_CURVE_HEADER = ("algorithm", "lambda", "seed", "regret", "h_final", "total_steps")
REGRET_SUMMARY_HEADER = ("algorithm", "lambda", "replicas", "failed", "q25", "median", "q75", "median_h_final",
                         "regret_kind", "median_regret_bound", "near_optimality_dim", "near_optimality_const")

SEARCH_ALGORITHMS = ("mixmatch", "mixmatch_refined")


@dataclass(frozen=True)
class ExperimentCell:
    algorithm: str
    Lambda: int
    replica: int
    seed: int


@dataclass
class CellOutcome:
    cell: ExperimentCell
    regret: Optional[float] = None
    h_final: Optional[int] = None
    total_steps: Optional[int] = None
    regret_bound: Optional[float] = None
    error: Optional[str] = None


@dataclass
class ExperimentReport:
    outcomes: List[CellOutcome]
    reports: List[RegretReport]
    curve_path: Optional[str] = None
    summary_path: Optional[str] = None


def check_algorithm(name: str):
    if name not in SEARCH_ALGORITHMS:
        BaselineKind.parse(name)


def run_algorithm(name: str, suite: ProblemSuite, Lambda: int, config: ExperimentConfigModel,
                  seed: int) -> SearchResult:
    schedule = schedule_from_config(config.schedule, suite.constants, Lambda)
    if name in SEARCH_ALGORITHMS:
        search_kwargs = dict(strategy=PartitionStrategy.from_name(config.strategy, seed), seed=seed,
                             nu2=config.nu2, rho2=config.rho2, selection_pool=config.selection_pool)
        if name == "mixmatch":
            return mix_and_match(suite, Lambda, config.node_steps, schedule, **search_kwargs)
        return mix_and_match_refined(suite, Lambda, config.node_steps, schedule,
                                     refine_scale=config.refine_scale, **search_kwargs)
    return run_baseline(BaselineKind.parse(name), suite, Lambda, schedule, seed=seed)


def _run_cell(cell: ExperimentCell, suite: ProblemSuite, config: ExperimentConfigModel) -> CellOutcome:
    try:
        result = run_algorithm(cell.algorithm, suite, cell.Lambda, config, cell.seed)
        return CellOutcome(cell=cell, regret=result_regret(suite, result, config.regret_kind),
                           h_final=result.tree_height, total_steps=result.total_steps,
                           regret_bound=result.regret_bound())
    except Exception as e:
        logger.error(f"Experiment cell {cell.algorithm} lambda={cell.Lambda} replica={cell.replica} failed: {e}")
        return CellOutcome(cell=cell, error=str(e))


def experiment_cells(config: ExperimentConfigModel) -> List[ExperimentCell]:
    cells = []
    for algorithm in config.algorithms:
        for Lambda in sorted(config.lambdas):
            for replica in range(config.replicas):
                cells.append(ExperimentCell(algorithm=algorithm, Lambda=Lambda, replica=replica,
                                            seed=derive_seed(config.seed, algorithm, Lambda, replica)))
    return cells


def run_experiment(config: ExperimentConfigModel, suite: ProblemSuite,
                   out_dir: Optional[str] = None) -> ExperimentReport:
    """
    Run every (algorithm, Lambda, replica) cell on a worker pool. Outputs are
    assembled in cell order, so they do not depend on completion order.
    """
    if config.regret_kind not in REGRET_KINDS:
        raise SuiteConfigError(f"Unknown regret kind {config.regret_kind}, expected one of {REGRET_KINDS}")
    if config.replicas < 1 or not config.lambdas or not config.algorithms:
        raise SuiteConfigError("An experiment needs algorithms, a budget grid and at least one replica")
    for algorithm in config.algorithms:
        check_algorithm(algorithm)

    cells = experiment_cells(config)
    outcomes: List[Optional[CellOutcome]] = [None] * len(cells)
    logger.info(f"Running {len(cells)} experiment cells on {config.workers} workers")
    with ThreadPoolExecutor(max_workers=max(config.workers, 1)) as executor:
        futures = {executor.submit(_run_cell, cell, suite, config): position for position, cell in enumerate(cells)}
        for future in tqdm(as_completed(futures), total=len(futures), desc="experiment", file=sys.stderr):
            outcomes[futures[future]] = future.result()

    reports = []
    for algorithm in config.algorithms:
        for Lambda in sorted(config.lambdas):
            group = [o for o in outcomes if o.cell.algorithm == algorithm and o.cell.Lambda == Lambda]
            reports.append(RegretReport(
                algorithm=algorithm, Lambda=Lambda, node_steps=config.node_steps,
                seeds=[o.cell.seed for o in group], regrets=[o.regret for o in group],
                heights=[o.h_final for o in group], total_steps=[o.total_steps for o in group],
                regret_bounds=[o.regret_bound for o in group], estimate=is_estimate(suite),
                regret_kind=config.regret_kind,
                near_optimality_dim=config.near_optimality_dim,
                near_optimality_const=config.near_optimality_const))
    for report in reports:
        logger.info(f"{report.algorithm} lambda={report.Lambda}: median regret {report.median_regret!r}, "
                    f"median height {report.median_h_final!r}, failed {report.failed}")

    out_dir = config.out_dir if out_dir is None else out_dir
    curve_path = os.path.join(out_dir, "regret_curve.csv")
    summary_path = os.path.join(out_dir, "regret_summary.csv")
    write_csv(curve_path, REGRET_CURVE_HEADER,
              [(o.cell.algorithm, o.cell.Lambda, o.cell.seed, o.regret, o.h_final, o.total_steps) for o in outcomes])
    write_csv(summary_path, REGRET_SUMMARY_HEADER, [report.summary_row() for report in reports])
    return ExperimentReport(outcomes=outcomes, reports=reports, curve_path=curve_path, summary_path=summary_path)
