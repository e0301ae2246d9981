from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


@dataclass
class RegretReport:
    algorithm: str
    Lambda: int
    node_steps: int
    seeds: List[int] = field(default_factory=list)
    # None marks a failed cell or an unavailable regret
    regrets: List[Optional[float]] = field(default_factory=list)
    heights: List[Optional[int]] = field(default_factory=list)
    total_steps: List[Optional[int]] = field(default_factory=list)
    regret_bounds: List[Optional[float]] = field(default_factory=list)
    estimate: bool = False
    regret_kind: str = "model"
    near_optimality_dim: Optional[float] = None
    near_optimality_const: Optional[float] = None

    @property
    def replicas(self) -> int:
        return len(self.seeds)

    @property
    def failed(self) -> int:
        return sum(1 for steps in self.total_steps if steps is None)

    def finite_regrets(self) -> np.ndarray:
        return np.asarray([value for value in self.regrets if value is not None], dtype=np.float64)

    def quartiles(self):
        values = self.finite_regrets()
        if values.size == 0:
            return None, None, None
        q25, median, q75 = np.quantile(values, [0.25, 0.5, 0.75])
        return float(q25), float(median), float(q75)

    @property
    def median_regret(self) -> Optional[float]:
        return self.quartiles()[1]

    @property
    def median_h_final(self) -> Optional[float]:
        heights = [height for height in self.heights if height is not None]
        if not heights:
            return None
        return float(np.median(heights))

    @property
    def median_regret_bound(self) -> Optional[float]:
        bounds = [bound for bound in self.regret_bounds if bound is not None]
        if not bounds:
            return None
        return float(np.median(bounds))

    def summary_row(self):
        return (self.algorithm, self.Lambda, self.replicas, self.failed, *self.quartiles(), self.median_h_final,
                self.regret_kind, self.median_regret_bound, self.near_optimality_dim, self.near_optimality_const)
