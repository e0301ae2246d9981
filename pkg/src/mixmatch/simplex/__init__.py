from mixmatch.simplex.mixture_weights import (MixtureWeights, validate_mixture, as_mixture, uniform_mixture,
                                              vertex_mixture)
from mixmatch.simplex.partition_strategy import PartitionKind, PartitionStrategy
from mixmatch.simplex.simplex_cell import (SimplexCell, root_cell, split_cell, representative, cell_diameter,
                                           diameter_bound, iterate_partition, cells_at_height)
