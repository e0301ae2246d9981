from typing import List, Optional

from pydantic import BaseModel, Field

from mixmatch.data_models.search_config_data import ScheduleConfigModel


class ExperimentConfigModel(BaseModel):
    suite: str = Field(default="config/suites/latent_quadratic_k3.yaml")
    algorithms: List[str] = Field(default_factory=lambda: ["genie", "mixmatch", "uniform"])
    lambdas: List[int] = Field(default_factory=lambda: [200_000])
    node_steps: int = Field(default=500)
    replicas: int = Field(default=10)
    seed: int = Field(default=0)
    strategy: str = Field(default="bisect")
    schedule: ScheduleConfigModel = Field(default_factory=ScheduleConfigModel)
    regret_kind: str = Field(default="model")
    selection_pool: str = Field(default="literal")
    refine_scale: float = Field(default=0.1)
    nu2: Optional[float] = Field(default=None)
    rho2: Optional[float] = Field(default=None)
    near_optimality_dim: Optional[float] = Field(default=None)
    near_optimality_const: Optional[float] = Field(default=None)
    workers: int = Field(default=4)
    out_dir: str = Field(default="output/experiment")


class VerifyConfigModel(BaseModel):
    steps: int = Field(default=100_000)
    budget: Optional[float] = Field(default=None)
    replicas: int = Field(default=200)
    k: int = Field(default=0)
    seed: int = Field(default=0)
    # overrides the theoretical offset for the 1/t rate study
    offset: Optional[float] = Field(default=None)
    pairs: int = Field(default=1000)
