"""Reproducible random streams

A stream is identified by (seed, stream_id). Streams are counter-based
Philox generators keyed through SeedSequence spawn keys, so distinct ids give
independent sequences and the same id replays the same draws.
"""
from typing import Tuple

import numpy as np
from pydantic import BaseModel, Field


_UINT64 = 2 ** 64


class RngStream(BaseModel):
    """Handle on one random stream."""

    seed: int = Field(..., ge=0, lt=_UINT64)
    stream_id: int = Field(0, ge=0, lt=_UINT64)
    path: Tuple[int, ...] = ()

    class Config:
        frozen = True

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of the stream."""
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,) + self.path)
        return np.random.Generator(np.random.Philox(sequence))

    def child(self, index: int) -> "RngStream":
        """Sub-stream `index`, independent of the parent and its siblings."""
        return RngStream(seed=self.seed, stream_id=self.stream_id, path=self.path + (int(index),))
