"""Deterministic random streams shared by the Python API and the jit kernels.

The generator is xoshiro256++ seeded through a SplitMix64 expansion of
(seed, stream_id).  The same state-array primitives are used from Python and
from inside numba kernels, so a growth run is bit-for-bit reproducible no
matter which path executes it.  Distinct stream ids give statistically
independent sequences; replica harnesses use stream_id = replica index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit, uint64

_MASK64 = (1 << 64) - 1


@njit(uint64(uint64), cache=True, inline="always")
def _mix64(z):
    # SplitMix64 finalizer
    z = z + uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (uint64(64) - k))


@njit(cache=True, inline="always")
def next_u64(state):
    """Advance the 4-word xoshiro256++ state, return the next output."""
    out = _rotl(state[0] + state[3], uint64(23)) + state[0]
    t = state[1] << uint64(17)
    state[2] ^= state[0]
    state[3] ^= state[1]
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    state[3] = _rotl(state[3], uint64(45))
    return out


@njit(cache=True, inline="always")
def rand_below(state, n):
    """Uniform uint64 in [0, n) without modulo bias (rejection sampling)."""
    threshold = (uint64(0) - n) % n
    while True:
        u = next_u64(state)
        if u >= threshold:
            return u % n


@njit(cache=True)
def seed_state(state, seed, stream_id):
    """Fill a 4-word state from (seed, stream_id) via SplitMix64."""
    z = _mix64(uint64(seed)) ^ _mix64(uint64(stream_id) ^ uint64(0xD2B74407B1CE6E93))
    nonzero = uint64(0)
    for i in range(4):
        z = z + uint64(0x9E3779B97F4A7C15)
        state[i] = _mix64(z)
        nonzero |= state[i]
    if nonzero == uint64(0):
        state[0] = uint64(0x9E3779B97F4A7C15)


@dataclass
class RngStream:
    """A named, reproducible random stream.

    Two streams with the same (seed, stream_id) produce identical draws;
    distinct stream ids give independent sequences.
    """

    seed: int
    stream_id: int = 0
    _state: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._state is None:
            state = np.empty(4, dtype=np.uint64)
            seed_state(state, self.seed & _MASK64, self.stream_id & _MASK64)
            object.__setattr__(self, "_state", state)

    @property
    def state(self) -> np.ndarray:
        return self._state

    def next_u64(self) -> int:
        return int(next_u64(self._state))

    def rand_below(self, n: int) -> int:
        if n <= 0:
            raise ValueError(f"rand_below needs n >= 1, got {n}")
        return int(rand_below(self._state, np.uint64(n)))

    def spawn(self, stream_id: int) -> "RngStream":
        """Fresh independent stream with the same master seed."""
        return RngStream(self.seed, stream_id)

    def clone(self) -> "RngStream":
        """Copy with the current internal state (not rewound)."""
        c = RngStream(self.seed, self.stream_id)
        c._state[:] = self._state
        return c
