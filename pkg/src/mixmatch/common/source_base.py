from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from mixmatch.data_models.samples import SampleBatch


class ConditionalBase(ABC):
    """Label law p(y | x, u), shared by every source of a suite."""

    def __init__(self, x_coef: np.ndarray, u_coef: np.ndarray, intercept: float = 0.0):
        self.x_coef = np.asarray(x_coef, dtype=np.float64)
        self.u_coef = np.asarray(u_coef, dtype=np.float64)
        self.intercept = float(intercept)

    def score(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        result = x @ self.x_coef + self.intercept
        if self.u_coef.size:
            result = result + u @ self.u_coef
        return result

    @abstractmethod
    def sample_labels(self, x: np.ndarray, u: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        pass


class SourceBase(ABC):
    def __init__(self, name: Optional[str] = None):
        self.name = name

    @property
    @abstractmethod
    def x_dim(self) -> int:
        pass

    @property
    @abstractmethod
    def latent_dim(self) -> int:
        pass

    @abstractmethod
    def draw(self, n: int, rng: np.random.Generator) -> SampleBatch:
        pass

    @abstractmethod
    def embedding_moments(self, embedding: str) -> Tuple[np.ndarray, np.ndarray]:
        """Mean and covariance of the embedded sample under this source."""
        pass

    @abstractmethod
    def feature_second_moment(self) -> float:
        """E||x||^2 under this source."""
        pass

    @abstractmethod
    def feature_radius(self) -> float:
        pass
