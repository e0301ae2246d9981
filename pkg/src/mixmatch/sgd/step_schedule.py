from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from mixmatch.common.mixmatch_errors import SuiteConfigError
from mixmatch.data_models.problem_constants import ProblemConstants
from mixmatch.data_models.search_config_data import ScheduleConfigModel
from mixmatch.sgd.concentration_bound import compute_E


class ScheduleMode(Enum):
    THEORETICAL = "theoretical"
    PRACTICAL = "practical"


@dataclass(frozen=True)
class StepSchedule:
    """
    theoretical: eta_t = 2 / (mu * (t + E)) for 0-based step t
    practical: eta_t = eta
    Both are multiplied by scale.
    """
    mu: float = 1.0
    E: float = 1.0
    mode: ScheduleMode = ScheduleMode.THEORETICAL
    eta: Optional[float] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise SuiteConfigError(f"Step scale must be positive, got {self.scale}")
        if self.mode == ScheduleMode.THEORETICAL:
            if self.mu <= 0 or self.E <= 0:
                raise SuiteConfigError(f"Theoretical schedule needs mu > 0 and E > 0, got mu={self.mu}, E={self.E}")
        elif self.eta is None or self.eta <= 0:
            raise SuiteConfigError(f"Practical schedule needs a positive eta, got {self.eta}")

    @classmethod
    def theoretical(cls, mu: float, E: float, scale: float = 1.0) -> "StepSchedule":
        return cls(mu=mu, E=E, mode=ScheduleMode.THEORETICAL, scale=scale)

    @classmethod
    def practical(cls, eta: float, scale: float = 1.0) -> "StepSchedule":
        return cls(mode=ScheduleMode.PRACTICAL, eta=eta, scale=scale)

    def step_size(self, t: int) -> float:
        if self.mode == ScheduleMode.THEORETICAL:
            return self.scale * 2.0 / (self.mu * (t + self.E))
        return self.scale * self.eta

    def step_sizes(self, start: int, count: int) -> np.ndarray:
        if self.mode == ScheduleMode.THEORETICAL:
            steps = np.arange(start, start + count, dtype=np.float64)
            return self.scale * 2.0 / (self.mu * (steps + self.E))
        return np.full(count, self.scale * self.eta)

    def scaled(self, factor: float) -> "StepSchedule":
        return replace(self, scale=self.scale * factor)


def step_size(t: int, schedule: StepSchedule) -> float:
    return schedule.step_size(t)


def parse_schedule_config(text: str, base: Optional[ScheduleConfigModel] = None) -> ScheduleConfigModel:
    """Parse "theoretical", "theoretical:<E>" or "practical:<eta>" on top of base."""
    config = (base or ScheduleConfigModel()).model_copy()
    mode, _, argument = text.strip().partition(":")
    mode = mode.lower()
    try:
        if mode == ScheduleMode.THEORETICAL.value:
            config.mode = mode
            config.offset = float(argument) if argument else None
        elif mode == ScheduleMode.PRACTICAL.value:
            config.mode = mode
            if argument:
                config.eta = float(argument)
        else:
            raise SuiteConfigError(f"Unknown schedule {text}")
    except ValueError as e:
        raise SuiteConfigError(f"Bad schedule {text}: {e}") from e
    return config


def schedule_from_config(config: ScheduleConfigModel, constants: ProblemConstants, Lambda: float) -> StepSchedule:
    mode = config.mode.lower()
    if mode == ScheduleMode.THEORETICAL.value:
        E = config.offset if config.offset is not None else compute_E(constants.kappa, Lambda)
        return StepSchedule.theoretical(constants.mu, E, scale=config.scale)
    if mode == ScheduleMode.PRACTICAL.value:
        return StepSchedule.practical(config.eta, scale=config.scale)
    raise SuiteConfigError(f"Unknown schedule mode {config.mode}")
