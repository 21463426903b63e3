"""
Counter-based random streams.

Each (master seed, run index, role) gets its own Philox generator seeded from
SeedSequence(master_seed, spawn_key=(run_index, role)). Streams are drawn as
uniform blocks of shape (steps, width); entry [k-1, e] belongs to step k and
entity e, so a block sequence never depends on nu, on the mode or on which
other roles a run consumes.
"""

from enum import IntEnum
from typing import Iterator, Tuple

import numpy as np


class StreamRole(IntEnum):
    NOISE = 0
    DITHER = 1
    CHANNEL = 2


def make_generator(master_seed: int, run_index: int, role: StreamRole) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(run_index), int(role)))
    return np.random.Generator(np.random.Philox(seq))


class UniformStream:
    """Sequential block reader over one (run, role) stream."""

    def __init__(self, master_seed: int, run_index: int, role: StreamRole, width: int):
        self.role = role
        self.width = int(width)
        self._rng = make_generator(master_seed, run_index, role)
        self._position = 0  # steps already handed out

    @property
    def position(self) -> int:
        return self._position

    def next_block(self, steps: int) -> np.ndarray:
        """Uniforms in [0, 1) for the next `steps` steps, shape (steps, width)."""
        block = self._rng.random((int(steps), self.width)) if self.width else np.zeros((int(steps), 0))
        self._position += int(steps)
        return block


def run_streams(master_seed: int, run_index: int, m: int, n_channels: int) -> Tuple[UniformStream, ...]:
    """(noise, dither, channel) streams for one run."""
    return (
        UniformStream(master_seed, run_index, StreamRole.NOISE, m),
        UniformStream(master_seed, run_index, StreamRole.DITHER, m),
        UniformStream(master_seed, run_index, StreamRole.CHANNEL, n_channels),
    )


def block_schedule(horizon: int, chunk: int) -> Iterator[Tuple[int, int]]:
    """(first step, block length) pairs covering steps 1..horizon."""
    start = 1
    while start <= horizon:
        length = min(chunk, horizon - start + 1)
        yield start, length
        start += length
