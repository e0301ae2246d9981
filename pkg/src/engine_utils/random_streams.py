import hashlib
from dataclasses import dataclass
from typing import Union

import numpy as np

StreamKey = Union[int, float, str, bytes]


def derive_seed(*keys: StreamKey) -> int:
    """
    Hash an ordered tuple of keys into a 64-bit seed. The encoding is
    type-tagged so that 1 and "1" derive different seeds.
    """
    digest = hashlib.blake2b(digest_size=8)
    for key in keys:
        if isinstance(key, bytes):
            tag, payload = b"b", key
        elif isinstance(key, str):
            tag, payload = b"s", key.encode("utf-8")
        elif isinstance(key, (bool, np.bool_)):
            tag, payload = b"?", str(bool(key)).encode("ascii")
        elif isinstance(key, (int, np.integer)):
            tag, payload = b"i", str(int(key)).encode("ascii")
        elif isinstance(key, (float, np.floating)):
            tag, payload = b"f", float(key).hex().encode("ascii")
        else:
            raise TypeError(f"Unsupported stream key type {type(key)}")
        digest.update(tag)
        digest.update(len(payload).to_bytes(4, "little"))
        digest.update(payload)
    return int.from_bytes(digest.digest(), "little")


@dataclass
class SampleStream:
    """
    Per-caller randomness. Source indices and source features are drawn from
    separate generators, so a mixture concentrated on one source replays that
    source's own feature stream exactly.
    """
    index_rng: np.random.Generator
    feature_rng: np.random.Generator

    @classmethod
    def from_seed(cls, *keys: StreamKey) -> "SampleStream":
        index_seq, feature_seq = np.random.SeedSequence(derive_seed(*keys)).spawn(2)
        return cls(index_rng=np.random.default_rng(index_seq),
                   feature_rng=np.random.default_rng(feature_seq))
