import math
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

from engine_utils.random_streams import derive_seed
from mixmatch.common.mixmatch_errors import InvalidCellError
from mixmatch.simplex.mixture_weights import MixtureWeights, as_mixture, validate_mixture
from mixmatch.simplex.partition_strategy import PartitionKind, PartitionStrategy

CONTAINS_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SimplexCell:
    vertices: Tuple[MixtureWeights, ...]
    height: int = 0
    index: int = 1

    @property
    def K(self) -> int:
        return len(self.vertices)

    @property
    def key(self) -> Tuple[int, int]:
        return self.height, self.index

    def vertex_array(self) -> np.ndarray:
        return np.asarray([vertex.weights for vertex in self.vertices], dtype=np.float64)

    def child_keys(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return (self.height + 1, 2 * self.index - 1), (self.height + 1, 2 * self.index)

    def barycentric(self, alpha) -> np.ndarray:
        point = as_mixture(alpha).as_array()
        if point.size != self.K:
            raise InvalidCellError(f"Mixture of length {point.size} does not fit a cell with K={self.K}")
        return np.linalg.solve(self.vertex_array().T, point)

    def contains(self, alpha, tolerance: float = CONTAINS_TOLERANCE) -> bool:
        return bool(np.all(self.barycentric(alpha) >= -tolerance))

    def volume(self) -> float:
        """(K-1)-dimensional volume; a K=1 cell is a point of unit counting measure."""
        if self.K == 1:
            return 1.0
        vertices = self.vertex_array()
        edges = vertices[1:] - vertices[0]
        gram_det = float(np.linalg.det(edges @ edges.T))
        return math.sqrt(max(gram_det, 0.0)) / math.factorial(self.K - 1)

    def to_json(self) -> str:
        return "[" + ",".join(vertex.to_json() for vertex in self.vertices) + "]"


def root_cell(K: int) -> SimplexCell:
    if K < 1:
        raise InvalidCellError(f"Root cell needs K >= 1, got {K}")
    vertices = []
    for i in range(K):
        weights = [0.0] * K
        weights[i] = 1.0
        vertices.append(MixtureWeights(tuple(weights)))
    return SimplexCell(vertices=tuple(vertices), height=0, index=1)


def _longest_edge(vertices: np.ndarray) -> Tuple[int, int]:
    best_pair = (0, 1)
    best_length = -1.0
    K = vertices.shape[0]
    for a in range(K):
        for b in range(a + 1, K):
            length = float(np.sum((vertices[a] - vertices[b]) ** 2))
            # strict comparison keeps the lexicographically smallest pair on ties
            if length > best_length:
                best_pair, best_length = (a, b), length
    return best_pair


def _halving_edge(cell: SimplexCell, vertices: np.ndarray, strategy: PartitionStrategy) -> Tuple[int, int]:
    rng = np.random.default_rng(derive_seed(strategy.rng_seed, "coordhalf", cell.height, cell.index))
    coordinate = int(rng.integers(cell.K))
    best_pair = None
    best_extent = 0.0
    for a in range(cell.K):
        for b in range(a + 1, cell.K):
            extent = abs(float(vertices[a, coordinate] - vertices[b, coordinate]))
            if extent > best_extent:
                best_pair, best_extent = (a, b), extent
    if best_pair is None:
        # the cell is flat along the drawn coordinate
        return _longest_edge(vertices)
    return best_pair


def split_cell(cell: SimplexCell, strategy: PartitionStrategy = PartitionStrategy()) -> Tuple[SimplexCell, SimplexCell]:
    if cell.K < 2:
        raise InvalidCellError("A single-vertex cell is a point and cannot be split")
    vertices = cell.vertex_array()
    if strategy.kind == PartitionKind.COORDINATE_HALVING:
        a, b = _halving_edge(cell, vertices, strategy)
    else:
        a, b = _longest_edge(vertices)
    midpoint = MixtureWeights(tuple(float(v) for v in (vertices[a] + vertices[b]) / 2.0))
    first_vertices = list(cell.vertices)
    first_vertices[b] = midpoint
    second_vertices = list(cell.vertices)
    second_vertices[a] = midpoint
    (first_height, first_index), (second_height, second_index) = cell.child_keys()
    return (SimplexCell(vertices=tuple(first_vertices), height=first_height, index=first_index),
            SimplexCell(vertices=tuple(second_vertices), height=second_height, index=second_index))


def representative(cell: SimplexCell) -> MixtureWeights:
    return validate_mixture(cell.vertex_array().mean(axis=0))


def cell_diameter(cell: SimplexCell) -> float:
    if cell.K == 1:
        return 0.0
    vertices = cell.vertex_array()
    distances = np.abs(vertices[:, None, :] - vertices[None, :, :]).sum(axis=-1)
    return float(distances.max())


def diameter_bound(h: int, K: int) -> float:
    if K < 2:
        raise InvalidCellError("The diameter bound is undefined for K=1")
    if h < 0:
        raise InvalidCellError(f"Height must be nonnegative, got {h}")
    return math.sqrt(2.0 * K) * (math.sqrt(3.0) / 2.0) ** (h / (K - 1) - 1.0)


def iterate_partition(K: int, height: int,
                      strategy: PartitionStrategy = PartitionStrategy()) -> Iterator[SimplexCell]:
    """Yield every cell of heights 0..height, level by level in index order."""
    level: List[SimplexCell] = [root_cell(K)]
    yield level[0]
    for _ in range(height):
        next_level = []
        for cell in level:
            next_level.extend(split_cell(cell, strategy))
        yield from next_level
        level = next_level


def cells_at_height(K: int, height: int, strategy: PartitionStrategy = PartitionStrategy()) -> List[SimplexCell]:
    return [cell for cell in iterate_partition(K, height, strategy) if cell.height == height]
