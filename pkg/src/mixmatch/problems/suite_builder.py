import math
from typing import Optional, Sequence

import numpy as np
from loguru import logger
from scipy.optimize import minimize

from engine_utils.random_streams import SampleStream
from mixmatch.common.csv_output import write_csv
from mixmatch.common.loss_problem_base import LossProblemBase
from mixmatch.common.mixmatch_errors import MixMatchError, SuiteConfigError
from mixmatch.common.source_base import ConditionalBase, SourceBase
from mixmatch.data_models.problem_constants import ProblemConstants
from mixmatch.data_models.samples import SampleBatch
from mixmatch.data_models.suite_config_data import LossConfigModel, SuiteConfigModel
from mixmatch.problems.conditionals import LogisticConditional, build_conditional
from mixmatch.problems.loss_problems import QuadraticProblem, RidgeLogisticProblem
from mixmatch.problems.problem_suite import ProblemSuite
from mixmatch.problems.sample_oracle import MixtureSampleOracle
from mixmatch.problems.sample_sources import GaussianSource
from mixmatch.simplex.mixture_weights import MixtureWeights, validate_mixture

SUITE_MANIFEST_HEADER = ("suite", "K", "mu", "beta", "L", "Gcal", "kappa", "sigma", "nu1", "nu2", "rho", "rho2")


def build_loss_problem(config: LossConfigModel, x_dim: int) -> LossProblemBase:
    kind = config.kind.lower()
    if kind == QuadraticProblem.kind:
        return QuadraticProblem(x_dim, config.embedding)
    if kind in (RidgeLogisticProblem.kind, "logistic"):
        return RidgeLogisticProblem(x_dim, config.regularization)
    raise SuiteConfigError(f"Unknown loss kind {config.kind}")


def embedding_moment_table(sources: Sequence[SourceBase], embedding: str):
    """Per-source embedding means (K, m) and second-moment traces tr(C_i) + ||m_i||^2."""
    means = []
    traces = []
    for source in sources:
        mean, covariance = source.embedding_moments(embedding)
        means.append(mean)
        traces.append(float(np.trace(covariance) + mean @ mean))
    return np.asarray(means), np.asarray(traces)


def _max_trace_covariance(means: np.ndarray, traces: np.ndarray) -> float:
    """max over the simplex of alpha.traces - ||alpha @ means||^2, a concave quadratic."""
    K = means.shape[0]

    def value(alpha: np.ndarray) -> float:
        mean = alpha @ means
        return float(alpha @ traces - mean @ mean)

    candidates = [value(np.eye(K)[i]) for i in range(K)]
    centroid = np.full(K, 1.0 / K)
    candidates.append(value(centroid))
    if K > 1:
        result = minimize(lambda a: -value(a), centroid,
                          jac=lambda a: -(traces - 2.0 * means @ (a @ means)),
                          method="SLSQP", bounds=[(0.0, 1.0)] * K,
                          constraints=({"type": "eq", "fun": lambda a: a.sum() - 1.0,
                                        "jac": lambda a: np.ones_like(a)},))
        polished = np.clip(result.x, 0.0, None)
        if polished.sum() > 0:
            candidates.append(value(polished / polished.sum()))
    return max(candidates)


def quadratic_constants(means: np.ndarray, traces: np.ndarray) -> ProblemConstants:
    K = means.shape[0]
    gcal = max(_max_trace_covariance(means, traces), 0.0)
    diameter = 0.0
    for i in range(K):
        for j in range(i + 1, K):
            diameter = max(diameter, float(np.linalg.norm(means[i] - means[j])))
    # mu = beta = 1 for the quadratic family
    return ProblemConstants.from_moduli(mu=1.0, beta=1.0, L=diameter + math.sqrt(gcal), Gcal=gcal,
                                        sigma=math.sqrt(diameter ** 2 + gcal), K=K)


def logistic_constants(sources: Sequence[SourceBase], regularization: float) -> ProblemConstants:
    """Conservative bounds from feature norms; ||w*|| <= sqrt(2 log 2 / reg) since F(w*) <= F(0)."""
    radius = max(source.feature_radius() for source in sources)
    second_moment = max(source.feature_second_moment() for source in sources)
    model_radius = math.sqrt(2.0 * math.log(2.0) / regularization)
    beta = radius ** 2 / 4.0 + regularization
    gcal = 2.0 * second_moment + 4.0 * regularization * math.log(2.0)
    diameter = 2.0 * model_radius
    lipschitz = math.sqrt(second_moment) + regularization * model_radius
    return ProblemConstants.from_moduli(mu=regularization, beta=beta, L=lipschitz, Gcal=gcal,
                                        sigma=math.sqrt(beta ** 2 * diameter ** 2 + gcal), K=len(sources))


def assemble_suite(name: str, loss: LossProblemBase, sources: Sequence[SourceBase], validation: SampleBatch,
                   loss_config: LossConfigModel, seed: int, true_mixture: Optional[MixtureWeights] = None,
                   conditional: Optional[ConditionalBase] = None, test: Optional[SampleBatch] = None) -> ProblemSuite:
    if len(validation) == 0:
        raise SuiteConfigError("Validation set must not be empty")
    oracle = MixtureSampleOracle(sources)
    if loss.kind == QuadraticProblem.kind:
        constants = quadratic_constants(*embedding_moment_table(sources, loss.embedding))
    else:
        constants = logistic_constants(sources, loss.regularization)
    suite = ProblemSuite(name=name, loss=loss, sources=tuple(sources), oracle=oracle, validation=validation,
                         validation_features=loss.features(validation), constants=constants,
                         true_mixture=true_mixture, conditional=conditional, test=test, seed=seed,
                         loss_config=loss_config)
    logger.info(f"Suite {name}: K={suite.K}, loss={loss.kind}, validation={len(validation)}, "
                f"mu={constants.mu!r}, beta={constants.beta!r}, Gcal={constants.Gcal!r}")
    return suite


def make_synthetic_suite(config: SuiteConfigModel, seed: Optional[int] = None) -> ProblemSuite:
    seed = config.seed if seed is None else seed
    K = len(config.sources)
    if K < 1:
        raise SuiteConfigError("A suite needs at least one source")
    if config.validation_size < 1:
        raise SuiteConfigError(f"Validation size must be positive, got {config.validation_size}")
    dim = config.x_dim + config.latent_dim
    conditional = build_conditional(config.conditional, config.x_dim, config.latent_dim)
    loss = build_loss_problem(config.loss, config.x_dim)
    if loss.kind == RidgeLogisticProblem.kind and not isinstance(conditional, LogisticConditional):
        raise SuiteConfigError("Ridge-logistic suites need the logistic conditional")

    sources = []
    for i, source_config in enumerate(config.sources):
        mean = np.asarray(source_config.mean, dtype=np.float64)
        if mean.shape != (dim,):
            raise SuiteConfigError(f"Source {i + 1}: mean must have length {dim}, got {mean.size}")
        covariance = np.eye(dim) if source_config.covariance is None else np.asarray(source_config.covariance)
        sources.append(GaussianSource(mean, covariance, config.x_dim, conditional,
                                      name=source_config.name or f"source_{i + 1}"))

    if config.true_mixture is None:
        if K != 1:
            raise SuiteConfigError("Synthetic suites with K > 1 need a true mixture")
        true_mixture = validate_mixture([1.0])
    else:
        try:
            true_mixture = validate_mixture(config.true_mixture)
        except MixMatchError as e:
            raise SuiteConfigError(f"Invalid true mixture: {e}") from e
        if true_mixture.K != K:
            raise SuiteConfigError(f"True mixture has length {true_mixture.K}, expected {K}")

    # validation and test draws follow the true mixture through the same oracle as training
    oracle = MixtureSampleOracle(sources)
    validation = oracle.draw_batch(true_mixture, config.validation_size, SampleStream.from_seed(seed, "validation"))
    test = None
    if config.test_size > 0:
        test = oracle.draw_batch(true_mixture, config.test_size, SampleStream.from_seed(seed, "test"))
    return assemble_suite(config.name, loss, sources, validation, config.loss, seed, true_mixture=true_mixture,
                          conditional=conditional, test=test)


def write_suite_manifest(suite: ProblemSuite, path: Optional[str]):
    c = suite.constants
    write_csv(path, SUITE_MANIFEST_HEADER,
              [(suite.name, c.K, c.mu, c.beta, c.L, c.Gcal, c.kappa, c.sigma, c.nu1, c.nu2, c.rho, c.rho2)])
