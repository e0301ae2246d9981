from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from loguru import logger

from engine_utils.random_streams import SampleStream
from mixmatch.common.loss_problem_base import LossProblemBase
from mixmatch.common.mixmatch_errors import BudgetError, DimensionMismatchError, SgdDivergenceError
from mixmatch.problems.trained_model import TrainedModel
from mixmatch.sgd.step_schedule import StepSchedule
from mixmatch.simplex.mixture_weights import as_mixture

SAMPLE_CHUNK = 4096

# draws n samples and returns their loss features, one row per sample
FeatureSampler = Callable[[int], np.ndarray]


@dataclass
class SgdRun:
    final_model: np.ndarray
    steps_taken: int
    initial_model: np.ndarray
    # squared distance to the oracle optimum at steps 0..T
    trace: Optional[np.ndarray] = None

    def trained_model(self) -> TrainedModel:
        return TrainedModel(weights=self.final_model, steps=self.steps_taken)


@dataclass
class BatchSgdRun:
    final_models: np.ndarray
    steps_taken: int
    trace_steps: Optional[np.ndarray] = None
    # shape (len(trace_steps), replicas)
    trace: Optional[np.ndarray] = None


def mixture_sampler(suite, alpha, stream: SampleStream) -> FeatureSampler:
    alpha = as_mixture(alpha)

    def draw(n: int) -> np.ndarray:
        return suite.loss.features(suite.oracle.draw_batch(alpha, n, stream))
    return draw


def finite_sampler(features: np.ndarray, stream: SampleStream) -> FeatureSampler:
    """Uniform draws with replacement from a fixed feature table."""
    def draw(n: int) -> np.ndarray:
        return features[stream.index_rng.integers(features.shape[0], size=n)]
    return draw


def run_sgd_batch(problem: LossProblemBase, samplers: Sequence[FeatureSampler], w0: np.ndarray, T: int,
                  schedule: StepSchedule, w_star: Optional[np.ndarray] = None,
                  trace_steps: Optional[Sequence[int]] = None) -> BatchSgdRun:
    """
    Advance len(samplers) independent unprojected SGD runs in lock-step. Replica r
    draws only from samplers[r], so a replica's result does not depend on how
    many others run beside it.
    """
    if T < 1:
        raise BudgetError(f"SGD needs at least one step, got T={T}")
    w0 = np.asarray(w0, dtype=np.float64)
    if w0.shape != (problem.model_dim,):
        raise DimensionMismatchError(f"Initial model shape {w0.shape}, expected ({problem.model_dim},)")
    replicas = len(samplers)
    models = np.tile(w0, (replicas, 1))

    steps = None
    trace = None
    if w_star is not None:
        w_star = np.asarray(w_star, dtype=np.float64)
        steps = np.arange(T + 1) if trace_steps is None else np.unique(np.asarray(trace_steps, dtype=np.int64))
        if steps[0] < 0 or steps[-1] > T:
            raise BudgetError(f"Trace steps must lie in [0, {T}]")
        trace = np.empty((steps.size, replicas))
    cursor = 0

    def record(step: int):
        nonlocal cursor
        if trace is not None and cursor < steps.size and steps[cursor] == step:
            trace[cursor] = np.sum((models - w_star) ** 2, axis=-1)
            cursor += 1

    record(0)
    t = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while t < T:
            count = min(SAMPLE_CHUNK, T - t)
            features = np.stack([sampler(count) for sampler in samplers], axis=1)
            etas = schedule.step_sizes(t, count)
            for j in range(count):
                gradient = problem.gradient(models, features[j])
                if not np.all(np.isfinite(gradient)):
                    logger.warning(f"SGD diverged at step {t + j}")
                    raise SgdDivergenceError(t + j)
                models = models - etas[j] * gradient
                record(t + j + 1)
            t += count
    return BatchSgdRun(final_models=models, steps_taken=T, trace_steps=steps, trace=trace)


def run_sgd_with_sampler(problem: LossProblemBase, sampler: FeatureSampler, w0: np.ndarray, T: int,
                         schedule: StepSchedule, w_star: Optional[np.ndarray] = None) -> SgdRun:
    batch = run_sgd_batch(problem, [sampler], w0, T, schedule, w_star=w_star)
    return SgdRun(final_model=batch.final_models[0], steps_taken=T,
                  initial_model=np.array(w0, dtype=np.float64),
                  trace=None if batch.trace is None else batch.trace[:, 0])


def run_sgd(suite, alpha, w0: np.ndarray, T: int, schedule: StepSchedule, stream: SampleStream,
            w_star: Optional[np.ndarray] = None) -> SgdRun:
    """T steps of SGD on the alpha-mixture, one oracle sample per step."""
    return run_sgd_with_sampler(suite.loss, mixture_sampler(suite, alpha, stream), w0, T, schedule, w_star)
