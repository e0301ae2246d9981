from typing import List, Optional

from pydantic import BaseModel, Field


class ScheduleConfigModel(BaseModel):
    mode: str = Field(default="practical")
    eta: float = Field(default=0.02)
    # offset of the theoretical schedule; derived from kappa and the budget when omitted
    offset: Optional[float] = Field(default=None)
    scale: float = Field(default=1.0)


class SearchConfigModel(BaseModel):
    budget: int = Field(default=200_000)
    node_steps: int = Field(default=500)
    # "constant" uses node_steps at every height, "theoretical" derives it from the problem constants
    node_budget: str = Field(default="constant")
    budget_khat: float = Field(default=0.0)
    strategy: str = Field(default="bisect")
    schedule: ScheduleConfigModel = Field(default_factory=ScheduleConfigModel)
    seed: int = Field(default=0)
    nu2: Optional[float] = Field(default=None)
    rho2: Optional[float] = Field(default=None)
    selection_pool: str = Field(default="literal")
    initial_model: Optional[List[float]] = Field(default=None)
