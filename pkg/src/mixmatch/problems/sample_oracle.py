import threading
from typing import Sequence

import numpy as np

from engine_utils.random_streams import SampleStream
from mixmatch.common.mixmatch_errors import InvalidMixtureError
from mixmatch.common.source_base import SourceBase
from mixmatch.data_models.samples import SampleBatch
from mixmatch.simplex.mixture_weights import as_mixture


class MixtureSampleOracle:
    """
    Draws from the alpha-mixture of the training sources: a source index per
    sample from the index generator, then that source's features from the
    feature generator, source by source in index order.
    """

    def __init__(self, sources: Sequence[SourceBase]):
        self.sources = tuple(sources)

    @property
    def K(self) -> int:
        return len(self.sources)

    def draw_latent_batch(self, alpha, n: int, stream: SampleStream) -> SampleBatch:
        weights = as_mixture(alpha).as_array()
        if weights.size != self.K:
            raise InvalidMixtureError(f"Mixture of length {weights.size} for a suite with K={self.K}")
        source_index = stream.index_rng.choice(self.K, size=n, p=weights)
        x_dim = self.sources[0].x_dim
        latent_dim = self.sources[0].latent_dim
        x = np.empty((n, x_dim))
        y = np.empty(n)
        u = np.empty((n, latent_dim))
        for i, source in enumerate(self.sources):
            positions = np.flatnonzero(source_index == i)
            if positions.size == 0:
                continue
            block = source.draw(positions.size, stream.feature_rng)
            x[positions] = block.x
            y[positions] = block.y
            u[positions] = block.u
        return SampleBatch(x=x, y=y, u=u, source=source_index)

    def draw_batch(self, alpha, n: int, stream: SampleStream) -> SampleBatch:
        return self.draw_latent_batch(alpha, n, stream).strip_latent()


class CountingSampleOracle(MixtureSampleOracle):
    """Mixture oracle that tallies every sample it hands out."""

    def __init__(self, inner: MixtureSampleOracle):
        super().__init__(inner.sources)
        self.inner = inner
        self.count = 0
        self._lock = threading.Lock()

    def draw_latent_batch(self, alpha, n: int, stream: SampleStream) -> SampleBatch:
        batch = self.inner.draw_latent_batch(alpha, n, stream)
        with self._lock:
            self.count += n
        return batch

    def reset(self):
        with self._lock:
            self.count = 0
