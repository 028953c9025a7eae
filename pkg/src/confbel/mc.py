"""Reproducible Monte Carlo configuration.

Every stochastic routine in this package draws through an :class:`MCConfig`.
The generator is counter-based (Philox), keyed by ``seed`` and ``stream_id``,
so identical configurations give bit-identical draws on every platform and
distinct stream ids give independent streams without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

_KEY_STRIDE = 1 << 64


@dataclass(frozen=True)
class MCConfig:
    """Replication count plus the key of a dedicated random stream."""

    reps: int = 100_000
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise ValueError(f"reps must be a positive integer, got {self.reps!r}")
        if not 0 <= int(self.seed) < _KEY_STRIDE:
            raise ValueError("seed must be a 64-bit non-negative integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be non-negative")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = int(self.seed) + _KEY_STRIDE * int(self.stream_id)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, offset: int) -> "MCConfig":
        """Config for an independent stream derived from this one."""
        if offset < 0:
            raise ValueError("substream offset must be non-negative")
        return replace(self, stream_id=self.stream_id + offset)

    def with_reps(self, reps: int) -> "MCConfig":
        return replace(self, reps=reps)

    def uniforms(self, n: int | None = None) -> np.ndarray:
        """``n`` (default ``reps``) uniforms from the start of the stream."""
        return self.generator().random(self.reps if n is None else n)
