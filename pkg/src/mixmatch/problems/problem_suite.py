import threading
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Hashable, Optional, Tuple

import numpy as np

from mixmatch.common.loss_problem_base import LossProblemBase
from mixmatch.common.source_base import ConditionalBase, SourceBase
from mixmatch.data_models.problem_constants import ProblemConstants
from mixmatch.data_models.samples import SampleBatch
from mixmatch.data_models.suite_config_data import LossConfigModel
from mixmatch.problems.sample_oracle import MixtureSampleOracle
from mixmatch.simplex.mixture_weights import MixtureWeights


class SuiteCache:
    """Memo for oracle quantities (optimal models, regret minimum) shared by copies of a suite."""

    def __init__(self):
        self._values: Dict[Hashable, object] = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key: Hashable, compute: Callable[[], object]):
        with self._lock:
            if key in self._values:
                return self._values[key]
        value = compute()
        with self._lock:
            return self._values.setdefault(key, value)


@dataclass(frozen=True)
class ProblemSuite:
    name: str
    loss: LossProblemBase
    sources: Tuple[SourceBase, ...]
    oracle: MixtureSampleOracle
    validation: SampleBatch
    validation_features: np.ndarray
    constants: ProblemConstants
    true_mixture: Optional[MixtureWeights] = None
    conditional: Optional[ConditionalBase] = None
    test: Optional[SampleBatch] = None
    seed: int = 0
    loss_config: LossConfigModel = field(default_factory=LossConfigModel)
    cache: SuiteCache = field(default_factory=SuiteCache, compare=False, repr=False)

    @property
    def K(self) -> int:
        return len(self.sources)

    @property
    def model_dim(self) -> int:
        return self.loss.model_dim

    @property
    def is_quadratic(self) -> bool:
        return self.loss.kind == "quadratic"

    def zero_model(self) -> np.ndarray:
        return np.zeros(self.model_dim)

    def with_oracle(self, oracle: MixtureSampleOracle) -> "ProblemSuite":
        return replace(self, oracle=oracle)
