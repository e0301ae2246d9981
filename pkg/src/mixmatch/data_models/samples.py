from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class Sample:
    x: np.ndarray
    y: float
    # latent features, never present on samples handed out by the oracle
    u: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SampleBatch:
    x: np.ndarray
    y: np.ndarray
    u: Optional[np.ndarray] = None
    source: Optional[np.ndarray] = None

    def __len__(self):
        return self.x.shape[0]

    def strip_latent(self) -> "SampleBatch":
        return replace(self, u=None)

    def sample(self, i: int) -> Sample:
        return Sample(x=self.x[i].copy(), y=float(self.y[i]), u=None if self.u is None else self.u[i].copy())

    @classmethod
    def from_samples(cls, samples: Sequence[Sample]) -> "SampleBatch":
        x = np.stack([np.asarray(sample.x, dtype=np.float64).ravel() for sample in samples])
        y = np.asarray([sample.y for sample in samples], dtype=np.float64)
        return cls(x=x, y=y)
