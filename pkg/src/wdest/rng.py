"""Seedable biased bit streams.

The uniform source is Philox4x64-10 (Salmon et al., "Parallel random numbers:
as easy as 1, 2, 3", SC'11), a counter-based generator with a 128-bit key and
a 256-bit counter.  A stream is keyed by ``(seed, stream_id)``: draw number
``t`` (0-based) of a stream is word ``t % 4`` of the Philox block computed for
counter ``t // 4 + 1`` and key ``(seed, stream_id)``.  numpy's
``numpy.random.Philox`` produces exactly this sequence through ``random_raw``;
:func:`philox4x64_10` is a pure-Python reference used to pin it down in
known-answer tests.

A biased bit is ``(u >> 11) < round(p_one * 2**53)`` for one 64-bit draw
``u``.  Each bit consumes exactly one draw.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitWord

MASK64 = (1 << 64) - 1

_PHILOX_M0 = 0xD2E7470EE14C6C93
_PHILOX_M1 = 0xCA5A826395121157
_PHILOX_W0 = 0x9E3779B97F4A7C15
_PHILOX_W1 = 0xBB67AE8584CAA73B


def philox4x64_10(counter: tuple[int, int, int, int], key: tuple[int, int]) -> list[int]:
    """One Philox4x64 block with 10 rounds."""
    c0, c1, c2, c3 = counter
    k0, k1 = key
    for _ in range(10):
        p0 = _PHILOX_M0 * c0
        p1 = _PHILOX_M1 * c2
        c0, c1, c2, c3 = (p1 >> 64) ^ c1 ^ k0, p1 & MASK64, (p0 >> 64) ^ c3 ^ k1, p0 & MASK64
        k0 = (k0 + _PHILOX_W0) & MASK64
        k1 = (k1 + _PHILOX_W1) & MASK64
    return [c0, c1, c2, c3]


@dataclass(frozen=True)
class BalanceSpec:
    """Balance ``beta = P(0) - P(1)`` of a Bernoulli bit, with 0 < |beta| < 1."""

    beta: float

    def __post_init__(self):
        b = float(self.beta)
        if not -1.0 < b < 1.0:
            raise ValueError(f"|beta| must be < 1, got {b} (deterministic input)")
        if b == 0.0:
            raise ValueError("beta = 0 carries no information about weights")
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_p_one(cls, p_one: float) -> BalanceSpec:
        return cls(1.0 - 2.0 * float(p_one))

    @property
    def epsilon(self) -> float:
        return abs(self.beta)

    @property
    def p_one(self) -> float:
        return (1.0 - self.beta) / 2.0

    @property
    def threshold(self) -> int:
        """53-bit integer threshold; a draw below it is a 1."""
        return round(self.p_one * 2**53)


@dataclass
class BitSource:
    """Single-owner stream of 64-bit draws keyed by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0
    draws: int = field(default=0, init=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v <= MASK64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")
        # An explicit uint64 array: a list of ints would round-trip through float64.
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._bg = np.random.Philox(key=key, counter=0)

    def raw(self, count: int) -> np.ndarray:
        self.draws += count
        return self._bg.random_raw(count)

    def bits(self, bal: BalanceSpec, count: int) -> np.ndarray:
        """``count`` independent bits as a uint8 array."""
        u = self.raw(count) >> np.uint64(11)
        return (u < np.uint64(bal.threshold)).astype(np.uint8)

    def below(self, m: int) -> int:
        """Uniform integer in ``[0, m)`` by rejection, one or more draws."""
        if m <= 0:
            raise ValueError("m must be positive")
        limit = (1 << 64) - ((1 << 64) % m)
        while True:
            u = int(self.raw(1)[0])
            if u < limit:
                return u % m

    def sample_indices(self, n: int, k: int) -> list[int]:
        """First k entries of a Fisher-Yates shuffle of ``range(n)``."""
        if not 0 <= k <= n:
            raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
        a = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            a[i], a[j] = a[j], a[i]
        return a[:k]

    def permutation(self, n: int) -> list[int]:
        return self.sample_indices(n, n)


def next_bit(src: BitSource, bal: BalanceSpec) -> int:
    return int(src.bits(bal, 1)[0])


def next_word(src: BitSource, bal: BalanceSpec, n: int) -> BitWord:
    if n < 1:
        raise ValueError("n must be positive")
    return BitWord.from_bits(src.bits(bal, n))


def substream(seed: int, batch_index: int) -> BitSource:
    return BitSource(seed, batch_index)
