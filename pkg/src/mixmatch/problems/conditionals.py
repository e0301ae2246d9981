import numpy as np
from scipy.special import expit

from mixmatch.common.mixmatch_errors import SuiteConfigError
from mixmatch.common.source_base import ConditionalBase
from mixmatch.data_models.suite_config_data import ConditionalConfigModel


class LinearGaussianConditional(ConditionalBase):
    kind = "linear"

    def __init__(self, x_coef: np.ndarray, u_coef: np.ndarray, intercept: float = 0.0, noise_std: float = 1.0):
        super().__init__(x_coef, u_coef, intercept)
        if noise_std < 0:
            raise SuiteConfigError(f"Label noise must be nonnegative, got {noise_std}")
        self.noise_std = float(noise_std)

    def sample_labels(self, x: np.ndarray, u: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        noise = rng.standard_normal(x.shape[0])
        return self.score(x, u) + self.noise_std * noise


class LogisticConditional(ConditionalBase):
    """Labels in {-1, +1} with P(y = 1 | x, u) = sigmoid(score)."""
    kind = "logistic"

    def sample_labels(self, x: np.ndarray, u: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        draws = rng.random(x.shape[0])
        return np.where(draws < expit(self.score(x, u)), 1.0, -1.0)


def build_conditional(config: ConditionalConfigModel, x_dim: int, latent_dim: int) -> ConditionalBase:
    x_coef = np.asarray(config.x_coef or [0.0] * x_dim, dtype=np.float64)
    u_coef = np.asarray(config.u_coef or [0.0] * latent_dim, dtype=np.float64)
    if x_coef.shape != (x_dim,) or u_coef.shape != (latent_dim,):
        raise SuiteConfigError(f"Conditional coefficients must have lengths {x_dim} and {latent_dim}, "
                               f"got {x_coef.size} and {u_coef.size}")
    kind = config.kind.lower()
    if kind == "linear":
        return LinearGaussianConditional(x_coef, u_coef, config.intercept, config.noise_std)
    if kind == "logistic":
        return LogisticConditional(x_coef, u_coef, config.intercept)
    raise SuiteConfigError(f"Unknown conditional kind {config.kind}")
