from typing import Optional

import numpy as np
from loguru import logger

from engine_utils.random_streams import SampleStream
from mixmatch.baselines.baseline_kind import BaselineKind, BaselineType
from mixmatch.common.mixmatch_errors import BudgetError, OracleUnavailableError
from mixmatch.problems.problem_suite import ProblemSuite
from mixmatch.sgd.sgd_engine import finite_sampler, mixture_sampler, run_sgd_with_sampler
from mixmatch.sgd.step_schedule import StepSchedule
from mixmatch.simplex.mixture_weights import MixtureWeights, uniform_mixture, vertex_mixture
from mixmatch.treesearch.mix_and_match import SearchResult


def baseline_stream(seed: int) -> SampleStream:
    return SampleStream.from_seed(seed, "baseline")


def baseline_mixture(kind: BaselineKind, suite: ProblemSuite) -> Optional[MixtureWeights]:
    """The mixture a baseline trains on, or None for the validation baseline."""
    if kind.kind == BaselineType.GENIE:
        if suite.true_mixture is None:
            raise OracleUnavailableError(f"Genie needs the true mixture, which suite {suite.name} does not know")
        return suite.true_mixture
    if kind.kind == BaselineType.UNIFORM:
        return uniform_mixture(suite.K)
    if kind.kind == BaselineType.ONLY_SOURCE:
        return vertex_mixture(suite.K, kind.source_index)
    return None


def run_baseline(kind: BaselineKind, suite: ProblemSuite, Lambda: int, schedule: StepSchedule, seed: int = 0,
                 w0: Optional[np.ndarray] = None) -> SearchResult:
    """Lambda SGD steps under a fixed training policy, reported in the shape of a search result."""
    if Lambda < 1:
        raise BudgetError(f"Baseline budget must be at least 1, got {Lambda}")
    w0 = suite.zero_model() if w0 is None else np.asarray(w0, dtype=np.float64)
    stream = baseline_stream(seed)
    alpha = baseline_mixture(kind, suite)
    if alpha is None:
        # with-replacement draws from the validation set, never through the training oracle
        sampler = finite_sampler(suite.validation_features, stream)
    else:
        sampler = mixture_sampler(suite, alpha, stream)
    run = run_sgd_with_sampler(suite.loss, sampler, w0, Lambda, schedule)
    logger.info(f"Baseline {kind.label} trained for {Lambda} steps"
                + ("" if alpha is None else f" at {alpha.to_json()}"))
    return SearchResult(label=kind.label, chosen_mixture=alpha, chosen_model=run.final_model, tree_height=0,
                        total_steps=run.steps_taken, node_count=1)
