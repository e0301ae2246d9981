import math
from typing import Optional, Tuple

import numpy as np

from mixmatch.common.mixmatch_errors import IngestError, SuiteConfigError
from mixmatch.common.source_base import ConditionalBase, SourceBase
from mixmatch.data_models.samples import SampleBatch
from mixmatch.problems.conditionals import LinearGaussianConditional

PSD_TOLERANCE = 1e-10


class GaussianSource(SourceBase):
    """
    Source whose joint (x, u) law is N(mean, covariance). Labels come from the
    conditional shared across the suite.
    """

    def __init__(self, mean: np.ndarray, covariance: np.ndarray, x_dim: int, conditional: ConditionalBase,
                 name: Optional[str] = None):
        super().__init__(name)
        self.mean = np.asarray(mean, dtype=np.float64)
        self.covariance = np.asarray(covariance, dtype=np.float64)
        dim = self.mean.size
        if self.covariance.shape != (dim, dim):
            raise SuiteConfigError(f"Source {name}: covariance shape {self.covariance.shape} does not match "
                                   f"mean length {dim}")
        if not 1 <= x_dim <= dim:
            raise SuiteConfigError(f"Source {name}: observed dimension {x_dim} outside [1, {dim}]")
        if not np.allclose(self.covariance, self.covariance.T):
            raise SuiteConfigError(f"Source {name}: covariance is not symmetric")
        eigenvalues, eigenvectors = np.linalg.eigh(self.covariance)
        if eigenvalues.min() < -PSD_TOLERANCE * max(1.0, abs(float(eigenvalues.max()))):
            raise SuiteConfigError(f"Source {name}: covariance is not positive semidefinite "
                                   f"(smallest eigenvalue {eigenvalues.min()!r})")
        self.factor = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
        self._x_dim = x_dim
        self.conditional = conditional

    @property
    def x_dim(self) -> int:
        return self._x_dim

    @property
    def latent_dim(self) -> int:
        return self.mean.size - self._x_dim

    def draw(self, n: int, rng: np.random.Generator) -> SampleBatch:
        joint = self.mean + rng.standard_normal((n, self.mean.size)) @ self.factor.T
        x = joint[:, :self._x_dim]
        u = joint[:, self._x_dim:]
        return SampleBatch(x=x, y=self.conditional.sample_labels(x, u, rng), u=u)

    def embedding_moments(self, embedding: str) -> Tuple[np.ndarray, np.ndarray]:
        d = self._x_dim
        if embedding == "x":
            return self.mean[:d].copy(), self.covariance[:d, :d].copy()
        if embedding != "xy":
            raise SuiteConfigError(f"Unknown embedding {embedding}")
        if not isinstance(self.conditional, LinearGaussianConditional):
            raise SuiteConfigError("The xy embedding needs a linear conditional for closed-form moments")
        # (x, y) is an affine image of (x, u) plus independent label noise
        transform = np.zeros((d + 1, self.mean.size))
        transform[:d, :d] = np.eye(d)
        transform[d, :d] = self.conditional.x_coef
        transform[d, d:] = self.conditional.u_coef
        mean = transform @ self.mean
        mean[d] += self.conditional.intercept
        covariance = transform @ self.covariance @ transform.T
        covariance[d, d] += self.conditional.noise_std ** 2
        return mean, covariance

    def feature_second_moment(self) -> float:
        d = self._x_dim
        return float(np.trace(self.covariance[:d, :d]) + self.mean[:d] @ self.mean[:d])

    def feature_radius(self) -> float:
        # five standard deviations stand in for the unbounded Gaussian support
        d = self._x_dim
        return float(np.linalg.norm(self.mean[:d]) + 5.0 * math.sqrt(max(np.trace(self.covariance[:d, :d]), 0.0)))


class FiniteSource(SourceBase):
    """A finite dataset sampled uniformly with replacement."""

    def __init__(self, x: np.ndarray, y: np.ndarray, name: Optional[str] = None):
        super().__init__(name)
        self.x = np.asarray(x, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.float64)
        if self.x.ndim != 2 or self.x.shape[0] == 0:
            raise IngestError(f"Source {name} has no rows")
        if self.y.shape != (self.x.shape[0],):
            raise IngestError(f"Source {name}: {self.y.size} labels for {self.x.shape[0]} rows")

    @property
    def x_dim(self) -> int:
        return self.x.shape[1]

    @property
    def latent_dim(self) -> int:
        return 0

    def __len__(self):
        return self.x.shape[0]

    def draw(self, n: int, rng: np.random.Generator) -> SampleBatch:
        rows = rng.integers(self.x.shape[0], size=n)
        return SampleBatch(x=self.x[rows], y=self.y[rows], u=np.zeros((n, 0)))

    def embedding_moments(self, embedding: str) -> Tuple[np.ndarray, np.ndarray]:
        if embedding == "x":
            rows = self.x
        elif embedding == "xy":
            rows = np.hstack([self.x, self.y[:, None]])
        else:
            raise SuiteConfigError(f"Unknown embedding {embedding}")
        mean = rows.mean(axis=0)
        centered = rows - mean
        return mean, centered.T @ centered / rows.shape[0]

    def feature_second_moment(self) -> float:
        return float(np.mean(np.sum(self.x ** 2, axis=1)))

    def feature_radius(self) -> float:
        return float(np.sqrt(np.sum(self.x ** 2, axis=1)).max())
