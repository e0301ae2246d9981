import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional

import numpy as np

from mixmatch.common.mixmatch_errors import NodeExpansionError, SuiteConfigError
from mixmatch.simplex.mixture_weights import MixtureWeights
from mixmatch.simplex.simplex_cell import SimplexCell


def b_value(val_loss: float, nu2: float, rho2: float, h: int) -> float:
    """Optimistic lower estimate of a node: its validation loss minus the height-h smoothness slack."""
    if not 0.0 < rho2 < 1.0:
        raise SuiteConfigError(f"rho2 must lie in (0, 1), got {rho2}")
    if nu2 < 0.0:
        raise SuiteConfigError(f"nu2 must be nonnegative, got {nu2}")
    if h < 0:
        raise SuiteConfigError(f"Height must be nonnegative, got {h}")
    return val_loss - 2.0 * nu2 * rho2 ** h


@dataclass
class SearchNode:
    cell: SimplexCell
    rep_mixture: MixtureWeights
    model: np.ndarray
    initial_model: np.ndarray
    val_loss: float = math.nan
    b_value: float = math.nan
    steps: int = 0
    children: List["SearchNode"] = field(default_factory=list)

    @property
    def height(self) -> int:
        return self.cell.height

    @property
    def index(self) -> int:
        return self.cell.index

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def attach(self, first: "SearchNode", second: "SearchNode"):
        if self.children:
            raise NodeExpansionError(f"Node ({self.height}, {self.index}) is already expanded")
        self.children = [first, second]

    def walk(self) -> Iterator["SearchNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


def select_leaf(leaves: Iterable[SearchNode]) -> SearchNode:
    """Leaf with minimum b-value; ties go to the smaller height, then the smaller index."""
    best: Optional[SearchNode] = None
    for leaf in leaves:
        if best is None or (leaf.b_value, leaf.height, leaf.index) < (best.b_value, best.height, best.index):
            best = leaf
    if best is None:
        raise NodeExpansionError("Cannot select from an empty set of leaves")
    return best


@dataclass(frozen=True)
class AuditEntry:
    order: int
    height: int
    index: int
    alpha: MixtureWeights
    steps: int
    val_loss: float
    b_value: float
