from abc import ABC, abstractmethod

import numpy as np

from mixmatch.data_models.samples import SampleBatch


class LossProblemBase(ABC):
    kind: str = ""

    def __init__(self, x_dim: int, model_dim: int):
        self.x_dim = x_dim
        self.model_dim = model_dim

    @abstractmethod
    def features(self, batch: SampleBatch) -> np.ndarray:
        """Row-per-sample array holding everything the loss reads from a sample."""
        pass

    @abstractmethod
    def gradient(self, w: np.ndarray, features: np.ndarray) -> np.ndarray:
        """Per-sample gradients; w and features share their leading axes."""
        pass

    @abstractmethod
    def losses(self, w: np.ndarray, features: np.ndarray) -> np.ndarray:
        pass
