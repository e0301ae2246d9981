from typing import List, Optional

from pydantic import BaseModel, Field


class SourceConfigModel(BaseModel):
    name: Optional[str] = Field(default=None)
    # joint mean of (x, u), observed coordinates first
    mean: List[float] = Field(default_factory=list)
    # joint covariance of (x, u); identity when omitted
    covariance: Optional[List[List[float]]] = Field(default=None)


class ConditionalConfigModel(BaseModel):
    kind: str = Field(default="linear")
    x_coef: List[float] = Field(default_factory=list)
    u_coef: List[float] = Field(default_factory=list)
    intercept: float = Field(default=0.0)
    noise_std: float = Field(default=1.0)


class LossConfigModel(BaseModel):
    kind: str = Field(default="quadratic")
    embedding: str = Field(default="x")
    regularization: float = Field(default=0.1)
    mc_samples: int = Field(default=20000)
    oracle_steps: int = Field(default=1_000_000)
    oracle_replicas: int = Field(default=5)


class SuiteConfigModel(BaseModel):
    name: str = Field(default="synthetic")
    x_dim: int = Field(default=1)
    latent_dim: int = Field(default=0)
    sources: List[SourceConfigModel] = Field(default_factory=list)
    conditional: ConditionalConfigModel = Field(default_factory=ConditionalConfigModel)
    loss: LossConfigModel = Field(default_factory=LossConfigModel)
    true_mixture: Optional[List[float]] = Field(default=None)
    validation_size: int = Field(default=500)
    test_size: int = Field(default=0)
    seed: int = Field(default=0)
