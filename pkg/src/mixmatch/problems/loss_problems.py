import numpy as np
from scipy.special import expit

from mixmatch.common.loss_problem_base import LossProblemBase
from mixmatch.common.mixmatch_errors import SuiteConfigError
from mixmatch.data_models.samples import SampleBatch


class QuadraticProblem(LossProblemBase):
    """f(w; z) = 0.5 * ||w - phi(z)||^2 with phi(z) = x or (x, y)."""
    kind = "quadratic"

    def __init__(self, x_dim: int, embedding: str = "x"):
        if embedding not in ("x", "xy"):
            raise SuiteConfigError(f"Unknown embedding {embedding}")
        super().__init__(x_dim, x_dim + (1 if embedding == "xy" else 0))
        self.embedding = embedding

    def features(self, batch: SampleBatch) -> np.ndarray:
        if self.embedding == "x":
            return np.asarray(batch.x, dtype=np.float64)
        return np.hstack([batch.x, np.asarray(batch.y, dtype=np.float64)[:, None]])

    def gradient(self, w: np.ndarray, features: np.ndarray) -> np.ndarray:
        return w - features

    def losses(self, w: np.ndarray, features: np.ndarray) -> np.ndarray:
        return 0.5 * np.sum((w - features) ** 2, axis=-1)


class RidgeLogisticProblem(LossProblemBase):
    """f(w; z) = log(1 + exp(-y <w, x>)) + reg/2 * ||w||^2 with labels in {-1, +1}."""
    kind = "ridge-logistic"

    def __init__(self, x_dim: int, regularization: float):
        if regularization <= 0:
            raise SuiteConfigError(f"Ridge-logistic needs a positive regularization, got {regularization}")
        super().__init__(x_dim, x_dim)
        self.regularization = float(regularization)

    def features(self, batch: SampleBatch) -> np.ndarray:
        return np.hstack([batch.x, np.asarray(batch.y, dtype=np.float64)[:, None]])

    def gradient(self, w: np.ndarray, features: np.ndarray) -> np.ndarray:
        x = features[..., :-1]
        y = features[..., -1]
        margin = y * np.sum(w * x, axis=-1)
        coefficient = -y * expit(-margin)
        return coefficient[..., None] * x + self.regularization * w

    def losses(self, w: np.ndarray, features: np.ndarray) -> np.ndarray:
        x = features[..., :-1]
        y = features[..., -1]
        margin = y * np.sum(w * x, axis=-1)
        return np.logaddexp(0.0, -margin) + 0.5 * self.regularization * np.sum(w * w, axis=-1)
