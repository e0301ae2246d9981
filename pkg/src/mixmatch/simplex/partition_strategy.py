from dataclasses import dataclass
from enum import Enum

from mixmatch.common.mixmatch_errors import InvalidCellError


class PartitionKind(Enum):
    LONGEST_EDGE_BISECTION = "longest-edge-bisection"
    COORDINATE_HALVING = "coordinate-halving"


_KIND_ALIASES = {
    "bisect": PartitionKind.LONGEST_EDGE_BISECTION,
    "longest-edge-bisection": PartitionKind.LONGEST_EDGE_BISECTION,
    "coordhalf": PartitionKind.COORDINATE_HALVING,
    "coordinate-halving": PartitionKind.COORDINATE_HALVING,
}


@dataclass(frozen=True)
class PartitionStrategy:
    kind: PartitionKind = PartitionKind.LONGEST_EDGE_BISECTION
    # only read by coordinate halving
    rng_seed: int = 0

    @classmethod
    def from_name(cls, name: str, rng_seed: int = 0) -> "PartitionStrategy":
        kind = _KIND_ALIASES.get(name.strip().lower())
        if kind is None:
            raise InvalidCellError(f"Unknown partition strategy {name}, expected one of {sorted(_KIND_ALIASES)}")
        return cls(kind=kind, rng_seed=rng_seed)
