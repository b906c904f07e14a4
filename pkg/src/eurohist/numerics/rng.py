"""Counter-based random streams.

Every draw is a pure function of ``(seed, stream_index, ordinal)``: the
counter ``(stream_index << 32) | ordinal`` is scattered by an odd
multiplier and passed through the SplitMix64 finaliser. Both steps are
bijections on 64-bit words, so distinct counters can never produce the
same word and distinct streams never overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_STREAM_BITS = 32
_MAX_ORDINAL = 1 << _STREAM_BITS


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * _M1 & _MASK
    z = (z ^ (z >> 27)) * _M2 & _MASK
    return z ^ (z >> 31)


def _key(seed: int) -> int:
    return _mix((seed & _MASK) ^ 0x6A09E667F3BCC909)


def _word(key: int, counter: int) -> int:
    return _mix((key + (counter + 1) * _GAMMA) & _MASK)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _check_stream(stream_index: int) -> None:
    if not 0 <= stream_index < (1 << _STREAM_BITS):
        raise DomainError(f"stream_index must lie in [0, 2**32), got {stream_index}")


def counter_words(seed: int, stream_index, ordinal) -> np.ndarray:
    """Vectorised raw 64-bit words; arguments broadcast against each other."""
    streams = np.asarray(stream_index, dtype=np.uint64)
    ordinals = np.asarray(ordinal, dtype=np.uint64)
    if ordinals.size and int(ordinals.max()) >= _MAX_ORDINAL:
        raise DomainError("ordinal exceeds the 2**32 draws available per stream")
    counter = (streams << np.uint64(_STREAM_BITS)) | ordinals
    with np.errstate(over="ignore"):
        z = np.uint64(_key(seed)) + (counter + np.uint64(1)) * np.uint64(_GAMMA)
        return _mix_array(z)


def counter_uniforms(seed: int, stream_index, ordinal) -> np.ndarray:
    """Uniforms on [0, 1) with 53 random bits, one per (stream, ordinal) pair."""
    words = counter_words(seed, stream_index, ordinal)
    return (words >> np.uint64(11)).astype(np.float64) * 2.0**-53


def counter_choices(seed: int, stream_index, ordinal, k: int) -> np.ndarray:
    if k < 1:
        raise DomainError(f"choice range must be positive, got {k}")
    u = counter_uniforms(seed, stream_index, ordinal)
    return np.minimum((u * k).astype(np.int64), k - 1)


@dataclass
class RandomStream:
    """A single-owner cursor over one counter-based stream."""

    seed: int
    stream_index: int = 0
    position: int = 0

    def __post_init__(self) -> None:
        _check_stream(self.stream_index)
        self._key = _key(self.seed)

    def next_word(self) -> int:
        if self.position >= _MAX_ORDINAL:
            raise DomainError("stream exhausted")
        counter = (self.stream_index << _STREAM_BITS) | self.position
        self.position += 1
        return _word(self._key, counter)

    def next_uniform(self) -> float:
        return (self.next_word() >> 11) * 2.0**-53

    def next_choice(self, k: int) -> int:
        if k < 1:
            raise DomainError(f"choice range must be positive, got {k}")
        return min(int(self.next_uniform() * k), k - 1)


def random_stream(seed: int, stream_index: int = 0) -> RandomStream:
    return RandomStream(seed, stream_index)


def next_uniform(stream: RandomStream) -> float:
    return stream.next_uniform()


def next_choice(stream: RandomStream, k: int) -> int:
    return stream.next_choice(k)
