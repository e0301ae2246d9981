import math
from dataclasses import dataclass
from typing import Optional

from mixmatch.common.mixmatch_errors import BudgetError
from mixmatch.data_models.problem_constants import ProblemConstants


@dataclass(frozen=True)
class ConcentrationBound:
    """High-probability bound on the squared distance d_{t+1}^2 after step t."""
    t: int
    Lambda: float
    k: int
    term_G: float
    term_diameter: float
    term_martingale: float
    total: float
    E: float


def compute_E(kappa: float, Lambda: float) -> float:
    if Lambda <= 1:
        raise BudgetError(f"Lambda must exceed 1, got {Lambda}")
    if kappa < 1:
        raise BudgetError(f"kappa must be at least 1, got {kappa}")
    return 4096.0 * kappa ** 2 * 8.0 * math.log(Lambda)


def log_lambda8(Lambda: float) -> float:
    """log(Lambda^8), natural log."""
    return 8.0 * math.log(Lambda)


def martingale_exponent(k: int) -> float:
    """sum_{i=1}^{k+1} 2^-i"""
    return 1.0 - 0.5 ** (k + 1)


def initial_term(d0sq: float, constants: ProblemConstants, E: float) -> float:
    return max(E * d0sq, 8.0 * constants.Gcal / constants.mu ** 2)


def diameter_constant(D: float, constants: ProblemConstants) -> float:
    return D * math.sqrt(8.0 * constants.beta ** 2 * D ** 2 + 2.0 * constants.Gcal)


def default_diameter(d0sq: float, constants: ProblemConstants, t: int, E: float) -> float:
    """Worst-case growth of the unprojected iterates: (d0 + sqrt(2G)/mu) * ((t+E)/E)^u."""
    growth = 2.0 * math.sqrt(2.0) * constants.kappa ** 1.5
    base = math.sqrt(d0sq) + math.sqrt(2.0 * constants.Gcal) / constants.mu
    return base * ((t + E) / E) ** growth


def martingale_constant(d0sq: float, constants: ProblemConstants, D: float, Lambda: float, k: int,
                        E: float) -> float:
    log8 = log_lambda8(Lambda)
    mu, beta, gcal = constants.mu, constants.beta, constants.Gcal
    c1 = initial_term(d0sq, constants, E) + 8.0 * diameter_constant(D, constants) / (mu * Lambda ** 6)
    c2 = 4.0 * math.sqrt(2.0) / mu
    v0 = 8.0 * d0sq * (4.0 * beta ** 2 * d0sq + gcal) / (1.0 + E)
    c_check = max(v0 / log8,
                  (32.0 * math.sqrt(2.0) * gcal / mu + 2.0 / E) ** 2,
                  (64.0 * beta ** 2 * c1 ** 2 / ((1.0 + E) * log8) + 8.0 * gcal * c1 / log8) ** 2)
    c_hat = c_check * log8
    for level in range(k):
        exponent = martingale_exponent(level)
        c_next = (64.0 * beta ** 2 * c1 ** 2 / (E + 1.0) ** (2.0 - exponent)
                  + 64.0 * c_hat * c2 ** 2 / (mu ** 2 * (E + 1.0) ** exponent)
                  + 8.0 * gcal * c1 / (E + 1.0) ** (1.0 - exponent)
                  + 8.0 * (gcal / mu) * math.sqrt(c_hat) * c2)
        c_hat = 2.0 ** (level + 1) * c_next + v0 * (1.0 + E) / (2.0 + E) ** (1.0 - exponent)
    return c_hat


def concentration_bound(d0sq: float, constants: ProblemConstants, D: float, t: int, Lambda: float, k: int = 0,
                        E: Optional[float] = None) -> ConcentrationBound:
    if Lambda <= 1 or Lambda < t + 1:
        raise BudgetError(f"Lambda={Lambda} must exceed 1 and be at least t+1={t + 1}")
    if k < 0 or t < 0:
        raise BudgetError(f"k and t must be nonnegative, got k={k}, t={t}")
    if D < math.sqrt(d0sq) * (1.0 - 1e-12):
        raise BudgetError(f"Diameter D={D} is smaller than the initial distance {math.sqrt(d0sq)}")
    if E is None:
        E = compute_E(constants.kappa, Lambda)
    mu = constants.mu
    term_G = initial_term(d0sq, constants, E) / (t + E + 1.0)
    term_diameter = 8.0 * (t + 1.0) * diameter_constant(D, constants) / (mu * (t + 1.0 + E) * Lambda ** 7)
    c_hat = martingale_constant(d0sq, constants, D, Lambda, k, E)
    term_martingale = (4.0 * math.sqrt(2.0 * log_lambda8(Lambda)) * math.sqrt(c_hat)
                       / (mu * (t + E + 1.0) ** martingale_exponent(k)))
    return ConcentrationBound(t=t, Lambda=Lambda, k=k, term_G=term_G, term_diameter=term_diameter,
                              term_martingale=term_martingale, total=term_G + term_diameter + term_martingale, E=E)


def budget_bracket(constants: ProblemConstants, Lambda: float, Khat: float, E: float,
                   rho: Optional[float] = None) -> float:
    rho = constants.rho if rho is None else rho
    log8 = log_lambda8(Lambda)
    kappa, mu = constants.kappa, constants.mu
    inner = (4.0 * E
             + 64.0 * math.sqrt(2.0) * kappa * Khat
             + 16.0 * math.sqrt(E * Khat) / (math.sqrt(mu) * Lambda ** 3)
             + 128.0 * kappa * math.sqrt(log8)
             + 16.0 * math.sqrt(2.0 * E * log8) / math.sqrt(mu))
    return inner / (rho * math.sqrt(1.0 + E))


def theoretical_budget(constants: ProblemConstants, Lambda: float, Khat: float, E: Optional[float] = None,
                       rho: Optional[float] = None) -> float:
    """Height-independent per-node SGD budget that keeps node estimates within the partition's decay."""
    if Lambda <= 1:
        raise BudgetError(f"Lambda must exceed 1, got {Lambda}")
    if Khat < 0:
        raise BudgetError(f"Khat must be nonnegative, got {Khat}")
    if E is None:
        E = compute_E(constants.kappa, Lambda)
    return budget_bracket(constants, Lambda, Khat, E, rho) ** 2 - E
