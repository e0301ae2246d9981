from typing import Tuple

import numpy as np
from loguru import logger

from engine_utils.random_streams import SampleStream
from mixmatch.common.loss_problem_base import LossProblemBase
from mixmatch.common.mixmatch_errors import DimensionMismatchError, InvalidMixtureError, UntrainedModelError
from mixmatch.data_models.problem_constants import ProblemConstants
from mixmatch.data_models.samples import Sample, SampleBatch
from mixmatch.problems.problem_suite import ProblemSuite
from mixmatch.problems.sample_oracle import MixtureSampleOracle
from mixmatch.problems.suite_builder import embedding_moment_table
from mixmatch.problems.trained_model import TrainedModel
from mixmatch.simplex.mixture_weights import MixtureWeights, as_mixture


def _checked_mixture(suite: ProblemSuite, alpha) -> MixtureWeights:
    alpha = as_mixture(alpha)
    if alpha.K != suite.K:
        raise InvalidMixtureError(f"Mixture of length {alpha.K} for a suite with K={suite.K}")
    return alpha


def _checked_model(problem: LossProblemBase, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (problem.model_dim,):
        raise DimensionMismatchError(f"Model shape {w.shape}, expected ({problem.model_dim},)")
    return w


def draw_sample(suite: ProblemSuite, alpha, stream: SampleStream) -> Sample:
    alpha = _checked_mixture(suite, alpha)
    return suite.oracle.draw_batch(alpha, 1, stream).sample(0)


def sample_grad(problem: LossProblemBase, w, z: Sample) -> np.ndarray:
    w = _checked_model(problem, w)
    x = np.asarray(z.x, dtype=np.float64).ravel()
    if x.size != problem.x_dim:
        raise DimensionMismatchError(f"Sample has {x.size} features, the problem expects {problem.x_dim}")
    features = problem.features(SampleBatch.from_samples([z]))
    return problem.gradient(w[None, :], features)[0]


def quadratic_moments(suite: ProblemSuite) -> Tuple[np.ndarray, np.ndarray]:
    return suite.cache.get_or_compute(("quadratic-moments",),
                                      lambda: embedding_moment_table(suite.sources, suite.loss.embedding))


def mixture_mean(suite: ProblemSuite, alpha) -> np.ndarray:
    means, _ = quadratic_moments(suite)
    return _checked_mixture(suite, alpha).as_array() @ means


def mixture_trace_covariance(suite: ProblemSuite, alpha) -> float:
    means, traces = quadratic_moments(suite)
    weights = _checked_mixture(suite, alpha).as_array()
    mean = weights @ means
    return float(weights @ traces - mean @ mean)


def truth_oracle(suite: ProblemSuite) -> MixtureSampleOracle:
    """An uncounted oracle for ground-truth computations."""
    return MixtureSampleOracle(suite.sources)


def averaged_loss(suite: ProblemSuite, alpha, w) -> float:
    alpha = _checked_mixture(suite, alpha)
    w = _checked_model(suite.loss, w)
    if suite.is_quadratic:
        gap = w - mixture_mean(suite, alpha)
        return float(0.5 * gap @ gap + 0.5 * mixture_trace_covariance(suite, alpha))
    # Monte Carlo estimate on a stream fixed by the mixture
    stream = SampleStream.from_seed(suite.seed, "averaged-loss", alpha.to_json())
    batch = truth_oracle(suite).draw_batch(alpha, suite.loss_config.mc_samples, stream)
    return float(np.mean(suite.loss.losses(w, suite.loss.features(batch))))


def validation_loss(suite: ProblemSuite, model, unsafe: bool = False) -> float:
    """
    Empirical validation loss. Only models produced by at least one SGD step
    are accepted unless unsafe is set.
    """
    if isinstance(model, TrainedModel):
        if model.steps < 1:
            raise UntrainedModelError("Validation loss queried on a model with zero SGD steps")
        weights = model.weights
    elif unsafe:
        weights = model
    else:
        raise UntrainedModelError("Validation loss only accepts TrainedModel tokens")
    weights = _checked_model(suite.loss, weights)
    return float(np.mean(suite.loss.losses(weights, suite.validation_features)))


def optimal_model(suite: ProblemSuite, alpha) -> np.ndarray:
    alpha = _checked_mixture(suite, alpha)
    if suite.is_quadratic:
        return mixture_mean(suite, alpha)
    return suite.cache.get_or_compute(("optimal-model", alpha.weights),
                                      lambda: _estimate_optimal_model(suite, alpha)).copy()


def _estimate_optimal_model(suite: ProblemSuite, alpha: MixtureWeights) -> np.ndarray:
    from mixmatch.sgd.sgd_engine import mixture_sampler, run_sgd_batch
    from mixmatch.sgd.step_schedule import StepSchedule

    config = suite.loss_config
    truth_suite = suite.with_oracle(truth_oracle(suite))
    samplers = [mixture_sampler(truth_suite, alpha, SampleStream.from_seed(suite.seed, "optimal-model",
                                                                         alpha.to_json(), replica))
                for replica in range(config.oracle_replicas)]
    # offset 4*kappa keeps the first step at 1/(2*beta)
    schedule = StepSchedule.theoretical(suite.constants.mu, max(4.0 * suite.constants.kappa, 1.0))
    logger.debug(f"Estimating optimal model of {alpha.to_json()} with {config.oracle_replicas} x "
                 f"{config.oracle_steps} SGD steps")
    run = run_sgd_batch(suite.loss, samplers, suite.zero_model(), config.oracle_steps, schedule)
    return run.final_models.mean(axis=0)


def is_estimate(suite: ProblemSuite) -> bool:
    """True when losses and optima of this suite are Monte Carlo or SGD estimates."""
    return not suite.is_quadratic


def problem_constants(suite: ProblemSuite) -> ProblemConstants:
    return suite.constants
