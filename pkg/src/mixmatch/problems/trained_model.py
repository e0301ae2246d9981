from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrainedModel:
    """A model vector together with the number of SGD steps that produced it."""
    weights: np.ndarray
    steps: int
