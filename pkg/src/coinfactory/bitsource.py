"""Deterministic randomness for coin tosses.

Every trial gets its own stream keyed by (seed, trial index), so runs are
reproducible bit for bit and trials can be generated in any order.  The
generator is a counter advanced through the SplitMix64 finalizer; uniforms
take the top 53 bits.  A toss of the p-coin is 1 exactly when the next
uniform is below p.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
TWO53 = float(1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_state(seed: int, trial: int) -> int:
    """Initial counter for the stream keyed by (seed, trial)."""
    return mix64(mix64(seed & MASK64) ^ ((trial * GOLDEN) & MASK64))


class BitSource:
    """Stream of p-coin tosses with an explicit seed and a toss counter.

    bias is the probability of drawing a 1.  consumed counts every draw,
    including plain uniforms handed out to callers that sample categorical
    outcomes themselves.
    """

    def __init__(self, seed: int, bias: float, trial: int = 0):
        if not 0.0 < bias < 1.0:
            raise ValueError(f"bias must lie in (0, 1), got {bias}")
        self.seed = seed
        self.bias = bias
        self.trial = trial
        self.consumed = 0
        self._state = stream_state(seed, trial)

    def uniform(self) -> float:
        """Next uniform in [0, 1) with 53 random bits."""
        self._state = (self._state + GOLDEN) & MASK64
        self.consumed += 1
        return (mix64(self._state) >> 11) / TWO53

    def next_bit(self) -> int:
        """Next toss of the p-coin."""
        return 1 if self.uniform() < self.bias else 0
