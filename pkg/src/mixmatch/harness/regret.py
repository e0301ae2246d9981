import itertools
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from mixmatch.common.mixmatch_errors import OracleUnavailableError, SuiteConfigError
from mixmatch.problems.problem_suite import ProblemSuite
from mixmatch.problems.suite_operations import (mixture_mean, mixture_trace_covariance, optimal_model,
                                                quadratic_moments, validation_loss)
from mixmatch.problems.trained_model import TrainedModel
from mixmatch.simplex.mixture_weights import as_mixture
from mixmatch.treesearch.mix_and_match import SearchResult

GRID_RESOLUTION = 64
GRID_MAX_K = 4
REGRET_KINDS = ("model", "mixture")


def quadratic_target(suite: ProblemSuite) -> Tuple[np.ndarray, float]:
    """
    (center, offset) with F_te(w) = 0.5 * ||w - center||^2 + offset. The test law
    is the true mixture when known, the empirical validation set otherwise.
    """
    def compute():
        if suite.true_mixture is not None:
            return (mixture_mean(suite, suite.true_mixture),
                    0.5 * mixture_trace_covariance(suite, suite.true_mixture))
        features = suite.validation_features
        center = features.mean(axis=0)
        return center, 0.5 * float(np.mean(np.sum((features - center) ** 2, axis=1)))
    return suite.cache.get_or_compute(("quadratic-target",), compute)


def target_loss(suite: ProblemSuite, model) -> float:
    """
    F_te of a model; exact for quadratic suites. Other suites go through the
    validation oracle, which only accepts TrainedModel tokens.
    """
    if suite.is_quadratic:
        weights = model.weights if isinstance(model, TrainedModel) else model
        center, offset = quadratic_target(suite)
        gap = np.asarray(weights, dtype=np.float64) - center
        return float(0.5 * gap @ gap + offset)
    return validation_loss(suite, model)


def mixture_objective(suite: ProblemSuite, alpha) -> float:
    """G(alpha): test loss of the optimal model of the alpha-mixture."""
    weights = optimal_model(suite, alpha)
    if suite.is_quadratic:
        return target_loss(suite, weights)
    return target_loss(suite, TrainedModel(weights=weights, steps=suite.loss_config.oracle_steps))


def simplex_grid(K: int, resolution: int = GRID_RESOLUTION) -> np.ndarray:
    """Every point of the simplex whose coordinates are multiples of 1/resolution."""
    points = []
    for bars in itertools.combinations(range(resolution + K - 1), K - 1):
        edges = (-1,) + bars + (resolution + K - 1,)
        points.append([edges[i + 1] - edges[i] - 1 for i in range(K)])
    return np.asarray(points, dtype=np.float64) / resolution


def _quadratic_minimum(suite: ProblemSuite) -> float:
    means, _ = quadratic_moments(suite)
    center, offset = quadratic_target(suite)
    K = suite.K

    def objective(alpha: np.ndarray) -> float:
        gap = alpha @ means - center
        return float(0.5 * gap @ gap + offset)

    if K <= GRID_MAX_K:
        grid = simplex_grid(K)
    else:
        grid = np.vstack([np.eye(K), np.full((1, K), 1.0 / K)])
    gaps = grid @ means - center
    values = 0.5 * np.sum(gaps ** 2, axis=1) + offset
    start = grid[int(np.argmin(values))]
    candidates = [float(values.min())]
    if K > 1:
        result = minimize(objective, start, jac=lambda a: means @ (a @ means - center), method="SLSQP",
                          bounds=[(0.0, 1.0)] * K,
                          constraints=({"type": "eq", "fun": lambda a: a.sum() - 1.0,
                                        "jac": lambda a: np.ones_like(a)},),
                          options={"ftol": 1e-15, "maxiter": 500})
        polished = np.clip(result.x, 0.0, None)
        if polished.sum() > 0:
            candidates.append(objective(polished / polished.sum()))
    if suite.true_mixture is not None:
        candidates.append(objective(suite.true_mixture.as_array()))
    return min(candidates)


def regret_minimum(suite: ProblemSuite) -> float:
    """min over the simplex of G."""
    def compute():
        if suite.is_quadratic:
            return _quadratic_minimum(suite)
        if suite.true_mixture is None:
            raise OracleUnavailableError(f"Suite {suite.name} has no regret oracle: supply a true mixture "
                                         f"or use a quadratic loss")
        return mixture_objective(suite, suite.true_mixture)
    return suite.cache.get_or_compute(("regret-minimum",), compute)


def simple_regret(suite: ProblemSuite, alpha) -> float:
    value = mixture_objective(suite, as_mixture(alpha)) - regret_minimum(suite)
    if suite.is_quadratic:
        return max(value, 0.0)
    return value


def model_excess_loss(suite: ProblemSuite, model) -> float:
    """Test loss of a trained model above the best achievable G."""
    return target_loss(suite, model) - regret_minimum(suite)


def result_regret(suite: ProblemSuite, result: SearchResult, regret_kind: str = "model") -> Optional[float]:
    if regret_kind == "model":
        return model_excess_loss(suite, result.trained_model())
    if regret_kind == "mixture":
        if result.chosen_mixture is None:
            return None
        return simple_regret(suite, result.chosen_mixture)
    raise SuiteConfigError(f"Unknown regret kind {regret_kind}, expected one of {REGRET_KINDS}")


def regret_if_known(suite: ProblemSuite, result: SearchResult, regret_kind: str = "model") -> Optional[float]:
    try:
        return result_regret(suite, result, regret_kind)
    except OracleUnavailableError:
        return None
