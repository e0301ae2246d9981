from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SplitPercentages(BaseModel):
    train: float = Field(default=100.0)
    validate_: float = Field(default=0.0, alias="validate")
    test: float = Field(default=0.0)
    discard: float = Field(default=0.0)

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def check_total(self):
        values = (self.train, self.validate_, self.test, self.discard)
        if any(value < 0 for value in values):
            raise ValueError(f"Split percentages must be nonnegative, got {values}")
        if abs(sum(values) - 100.0) > 0.01:
            raise ValueError(f"Split percentages must sum to 100, got {sum(values)}")
        return self


class IngestSpec(BaseModel):
    path: str
    source_column: str
    label_column: str
    feature_columns: Optional[List[str]] = Field(default=None)
    one_hot_columns: List[str] = Field(default_factory=list)
    splits: Dict[str, SplitPercentages] = Field(default_factory=dict)
    default_split: SplitPercentages = Field(default_factory=SplitPercentages)
    loss: str = Field(default="quadratic")
    embedding: str = Field(default="x")
    regularization: float = Field(default=0.1)
    seed: int = Field(default=0)
    name: Optional[str] = Field(default=None)

    @field_validator("splits", mode="before")
    @classmethod
    def stringify_source_keys(cls, value):
        # YAML reads unquoted codes such as 36 as ints; source values are compared as strings
        if isinstance(value, dict):
            return {str(key): split for key, split in value.items()}
        return value
