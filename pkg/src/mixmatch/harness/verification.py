import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from loguru import logger

from engine_utils.random_streams import SampleStream, derive_seed
from mixmatch.common.mixmatch_errors import BudgetError, SuiteConfigError
from mixmatch.harness.regret import quadratic_target
from mixmatch.problems.problem_suite import ProblemSuite
from mixmatch.problems.suite_operations import optimal_model, quadratic_moments
from mixmatch.sgd.concentration_bound import compute_E, concentration_bound, default_diameter
from mixmatch.sgd.sgd_engine import mixture_sampler, run_sgd_batch
from mixmatch.sgd.step_schedule import StepSchedule
from mixmatch.simplex.mixture_weights import uniform_mixture

VERIFY_SGD_HEADER = ("t", "empirical_mean_dsq", "empirical_p99_dsq", "bound_term_G", "bound_term_diam",
                     "bound_term_mart", "bound_total")
VERIFY_SMOOTHNESS_HEADER = ("pairs", "violations_optimum", "violations_objective", "max_ratio_optimum",
                            "max_ratio_objective")
RATE_WINDOW = (1_000, 100_000)
RATE_SLOPE_RANGE = (-1.25, -0.75)
RATE_POINTS = 25
RELATIVE_SLACK = 1e-12


@dataclass
class SmoothnessReport:
    pairs: int
    violations_optimum: int
    violations_objective: int
    max_ratio_optimum: float
    max_ratio_objective: float

    @property
    def passed(self) -> bool:
        return self.violations_optimum == 0 and self.violations_objective == 0

    def csv_row(self):
        return (self.pairs, self.violations_optimum, self.violations_objective, self.max_ratio_optimum,
                self.max_ratio_objective)


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else math.inf


def verify_smoothness(suite: ProblemSuite, pairs: int, seed: int = 0) -> SmoothnessReport:
    """
    Check on random mixture pairs that optimal models move at most 2*sigma/mu
    per unit of l1 mixture distance, and that G moves at most L per unit of
    optimal-model distance.
    """
    if not suite.is_quadratic:
        raise SuiteConfigError("Smoothness verification needs closed-form optima (quadratic suite)")
    rng = np.random.default_rng(derive_seed(seed, "smoothness"))
    constants = suite.constants
    means, _ = quadratic_moments(suite)
    center, _ = quadratic_target(suite)
    first = rng.dirichlet(np.ones(suite.K), size=pairs)
    second = rng.dirichlet(np.ones(suite.K), size=pairs)
    optimum_gaps = np.linalg.norm(first @ means - second @ means, axis=1)
    mixture_gaps = np.abs(first - second).sum(axis=1)
    objective_first = 0.5 * np.sum((first @ means - center) ** 2, axis=1)
    objective_second = 0.5 * np.sum((second @ means - center) ** 2, axis=1)
    objective_gaps = np.abs(objective_first - objective_second)

    violations_optimum = violations_objective = 0
    max_ratio_optimum = max_ratio_objective = 0.0
    for optimum_gap, mixture_gap, objective_gap in zip(optimum_gaps, mixture_gaps, objective_gaps):
        optimum_bound = 2.0 * constants.sigma / constants.mu * mixture_gap
        objective_bound = constants.L * optimum_gap
        violations_optimum += int(optimum_gap > optimum_bound * (1.0 + RELATIVE_SLACK))
        violations_objective += int(objective_gap > objective_bound * (1.0 + RELATIVE_SLACK) + 1e-15)
        max_ratio_optimum = max(max_ratio_optimum, _ratio(float(optimum_gap), float(optimum_bound)))
        max_ratio_objective = max(max_ratio_objective, _ratio(float(objective_gap), float(objective_bound)))
    report = SmoothnessReport(pairs=pairs, violations_optimum=violations_optimum,
                              violations_objective=violations_objective, max_ratio_optimum=max_ratio_optimum,
                              max_ratio_objective=max_ratio_objective)
    logger.info(f"Smoothness over {pairs} pairs: {violations_optimum} optimum and {violations_objective} "
                f"objective violations, max ratios {max_ratio_optimum!r} and {max_ratio_objective!r}")
    return report


@dataclass
class ConcentrationRow:
    t: int
    mean_dsq: float
    p99_dsq: float
    term_G: float
    term_diameter: float
    term_martingale: float
    total: float
    violations: int
    allowed_violations: float

    def csv_row(self):
        return (self.t, self.mean_dsq, self.p99_dsq, self.term_G, self.term_diameter, self.term_martingale,
                self.total)


@dataclass
class ConcentrationReport:
    rows: List[ConcentrationRow]
    E: float
    replicas: int
    slope: Optional[float] = None
    check_rate: bool = False
    rate_steps: List[int] = field(default_factory=list)
    rate_medians: List[float] = field(default_factory=list)

    @property
    def bound_ok(self) -> bool:
        return all(row.violations <= row.allowed_violations for row in self.rows)

    @property
    def rate_ok(self) -> bool:
        if not self.check_rate:
            return True
        return self.slope is not None and RATE_SLOPE_RANGE[0] <= self.slope <= RATE_SLOPE_RANGE[1]

    @property
    def passed(self) -> bool:
        return self.bound_ok and self.rate_ok


def bound_steps(T: int) -> List[int]:
    """0, every power of ten below T-1, and T-1."""
    steps = {0, T - 1}
    power = 1
    while power < T - 1:
        steps.add(power)
        power *= 10
    return sorted(steps)


def rate_steps(T: int) -> List[int]:
    low, high = RATE_WINDOW[0], min(RATE_WINDOW[1], T)
    if high <= low:
        return []
    return sorted({int(round(v)) for v in np.geomspace(low, high, RATE_POINTS)})


def allowed_violations(t: int, Lambda: float, replicas: int) -> float:
    """Expected violations at failure probability (t+1)/Lambda^8 plus three binomial standard deviations."""
    probability = min(1.0, (t + 1) / Lambda ** 8)
    return replicas * probability + 3.0 * math.sqrt(replicas * probability * (1.0 - probability))


def verify_concentration(suite: ProblemSuite, T: int, Lambda: float, replicas: int, k: int = 0, seed: int = 0,
                         E: Optional[float] = None, D: Optional[float] = None) -> ConcentrationReport:
    """
    Run traced SGD replicas under the theoretical schedule and compare the
    empirical squared distances d_{t+1}^2 against the high-probability bound at
    step t. The replicas train on the true mixture when known, else the uniform one.
    With an explicit offset E the 1/t decay rate of the median is also checked.
    """
    if not suite.is_quadratic:
        raise SuiteConfigError("Concentration verification needs closed-form optima (quadratic suite)")
    if Lambda < T + 1:
        raise BudgetError(f"Lambda={Lambda} must be at least T+1={T + 1}")
    constants = suite.constants
    check_rate = E is not None
    E = compute_E(constants.kappa, Lambda) if E is None else E
    alpha = suite.true_mixture or uniform_mixture(suite.K)
    w_star = optimal_model(suite, alpha)
    w0 = suite.zero_model()
    d0sq = float(np.sum((w0 - w_star) ** 2))

    steps = bound_steps(T)
    rates = rate_steps(T)
    samplers = [mixture_sampler(suite, alpha, SampleStream.from_seed(seed, "replica", replica))
                for replica in range(replicas)]
    run = run_sgd_batch(suite.loss, samplers, w0, T, StepSchedule.theoretical(constants.mu, E), w_star=w_star,
                        trace_steps=[t + 1 for t in steps] + rates)
    trace_row = {int(step): position for position, step in enumerate(run.trace_steps)}

    rows = []
    for t in steps:
        values = run.trace[trace_row[t + 1]]
        diameter = default_diameter(d0sq, constants, t, E) if D is None else D
        bound = concentration_bound(d0sq, constants, diameter, t, Lambda, k, E)
        rows.append(ConcentrationRow(t=t, mean_dsq=float(values.mean()), p99_dsq=float(np.quantile(values, 0.99)),
                                     term_G=bound.term_G, term_diameter=bound.term_diameter,
                                     term_martingale=bound.term_martingale, total=bound.total,
                                     violations=int(np.sum(values > bound.total)),
                                     allowed_violations=allowed_violations(t, Lambda, replicas)))

    medians = [float(np.median(run.trace[trace_row[step]])) for step in rates]
    slope = None
    if len(rates) >= 2 and all(median > 0 for median in medians):
        slope = float(np.polyfit(np.log(rates), np.log(medians), 1)[0])
    report = ConcentrationReport(rows=rows, E=E, replicas=replicas, slope=slope, check_rate=check_rate,
                                 rate_steps=rates, rate_medians=medians)
    logger.info(f"Concentration over {replicas} replicas, T={T}, E={E!r}: "
                f"{sum(row.violations for row in rows)} bound violations, median decay slope {slope!r}")
    return report
