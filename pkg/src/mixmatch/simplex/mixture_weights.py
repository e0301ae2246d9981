import json
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from mixmatch.common.mixmatch_errors import InvalidMixtureError

SIMPLEX_TOLERANCE = 1e-9
CLAMP_TOLERANCE = 1e-12


@dataclass(frozen=True)
class MixtureWeights:
    """
    A point on the (K-1)-simplex. Build through validate_mixture; the raw
    constructor is reserved for points already known to lie on the simplex.
    """
    weights: Tuple[float, ...]

    @property
    def K(self) -> int:
        return len(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)

    def to_json(self) -> str:
        return json.dumps(list(self.weights))

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)


def validate_mixture(raw: Sequence[float]) -> MixtureWeights:
    values = np.asarray(raw, dtype=np.float64).ravel()
    if values.size == 0:
        raise InvalidMixtureError("Mixture weights must not be empty")
    if not np.all(np.isfinite(values)):
        raise InvalidMixtureError(f"Mixture weights must be finite, got {values.tolist()}")
    if np.any(values < -CLAMP_TOLERANCE):
        raise InvalidMixtureError(f"Negative mixture weight in {values.tolist()}")
    values = np.where(values < 0.0, 0.0, values)
    total = float(values.sum())
    if abs(total - 1.0) > SIMPLEX_TOLERANCE:
        raise InvalidMixtureError(f"Mixture weights sum to {total!r}, expected 1")
    values = values / total
    return MixtureWeights(tuple(float(v) for v in values))


def as_mixture(alpha) -> MixtureWeights:
    if isinstance(alpha, MixtureWeights):
        return alpha
    return validate_mixture(alpha)


def uniform_mixture(K: int) -> MixtureWeights:
    if K < 1:
        raise InvalidMixtureError(f"K must be positive, got {K}")
    return validate_mixture(np.full(K, 1.0 / K))


def vertex_mixture(K: int, index: int) -> MixtureWeights:
    """Standard basis vector e_index, with a 1-based index."""
    if not 1 <= index <= K:
        raise InvalidMixtureError(f"Source index {index} outside [1, {K}]")
    weights = [0.0] * K
    weights[index - 1] = 1.0
    return MixtureWeights(tuple(weights))
