"""Reproducible random streams.

A ``RandomStream`` names a position in a tree of independent substreams:
``(seed, stream_id)`` where ``stream_id`` is a tuple of integers such as
(n-index, replicate). Each generator is a counter-based Philox bit generator
keyed by ``SeedSequence(seed, spawn_key=stream_id)``, so a replicate's draws do
not depend on which worker ran it or in which order.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class RandomStream(BaseModel):
    """Descriptor of one independent random substream."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(..., ge=0, description="Master seed")
    stream_id: tuple[int, ...] = Field((), description="Path of substream indices")

    def child(self, *index: int) -> RandomStream:
        """Substream ``stream_id + index``."""
        return RandomStream(seed=self.seed, stream_id=self.stream_id + tuple(int(i) for i in index))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this substream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.Philox(seq))
