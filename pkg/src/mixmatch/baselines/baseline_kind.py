from dataclasses import dataclass
from enum import Enum
from typing import Optional

from mixmatch.common.mixmatch_errors import InvalidMixtureError


class BaselineType(Enum):
    GENIE = "genie"
    UNIFORM = "uniform"
    VALIDATION = "validation"
    ONLY_SOURCE = "only"


@dataclass(frozen=True)
class BaselineKind:
    kind: BaselineType
    # 1-based, only for ONLY_SOURCE
    source_index: Optional[int] = None

    def __post_init__(self):
        if self.kind == BaselineType.ONLY_SOURCE:
            if self.source_index is None or self.source_index < 1:
                raise InvalidMixtureError(f"Only-source baseline needs a positive source index, "
                                          f"got {self.source_index}")

    @property
    def label(self) -> str:
        if self.kind == BaselineType.ONLY_SOURCE:
            return f"only:{self.source_index}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> "BaselineKind":
        name, _, argument = text.strip().lower().partition(":")
        if name == BaselineType.ONLY_SOURCE.value:
            try:
                return cls(BaselineType.ONLY_SOURCE, int(argument))
            except ValueError:
                raise InvalidMixtureError(f"Bad source index in baseline {text}") from None
        try:
            kind = BaselineType(name)
        except ValueError:
            raise InvalidMixtureError(f"Unknown baseline {text}") from None
        if kind == BaselineType.ONLY_SOURCE or argument:
            raise InvalidMixtureError(f"Unknown baseline {text}")
        return cls(kind)
