"""Fixed-length block procedures for rational targets.

A block reads k + 2r tosses: a payload v of length k followed by padding w
of length 2r.  Padding words must contain exactly r ones, which makes their
probability p^r q^r independent of content and supplies extra room: within
the weight class of v there are C(k, ones(v)) * C(2r, r) equally likely
(v, w) pairs.  Numbering those pairs and comparing against the threshold
vectors d <= e turns the pair certificate from bernstein_from_rational into
a procedure whose conditional label-1 probability is exactly f(p): the
first d_i pair numbers emit 1, the next e_i - d_i emit 0, the rest discard
the block and start over.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .bitsource import BitSource
from .errors import LengthMismatch, StepCapExceeded
from .ratfunc import (
    BernsteinPair,
    HomogeneousPoly,
    RationalFunction,
    bernstein_from_rational,
)

DEFAULT_STEP_CAP = 2**32


def rank_word(word) -> int:
    """Position of a fixed-weight word in colexicographic order.

    Sums C(position, j) over the ascending positions of the ones, the j-th
    one (1-based) contributing C(position, j).  Bijective onto
    0..C(len, weight)-1.
    """
    rank = 0
    ones = 0
    for pos, bit in enumerate(word):
        if bit not in (0, 1):
            raise LengthMismatch(f"not a bit: {bit!r}")
        if bit:
            ones += 1
            rank += comb(pos, ones)
    return rank


def unrank_word(rank: int, length: int, weight: int) -> tuple[int, ...]:
    """Inverse of rank_word for the given length and weight."""
    if not 0 <= weight <= length:
        raise LengthMismatch("weight out of range")
    if not 0 <= rank < comb(length, weight):
        raise LengthMismatch("rank out of range")
    word = [0] * length
    remaining = rank
    for j in range(weight, 0, -1):
        pos = j - 1
        while comb(pos + 1, j) <= remaining:
            pos += 1
        word[pos] = 1
        remaining -= comb(pos, j)
    return tuple(word)


@dataclass(frozen=True)
class BlockSimulation:
    """Payload length k, padding half-width r, and threshold vectors."""

    k: int
    r: int
    d: tuple[int, ...]
    e: tuple[int, ...]

    @property
    def block_length(self) -> int:
        return self.k + 2 * self.r

    def __post_init__(self):
        if len(self.d) != self.k + 1 or len(self.e) != self.k + 1:
            raise ValueError("need k + 1 thresholds")
        room = comb(2 * self.r, self.r)
        for i, (di, ei) in enumerate(zip(self.d, self.e)):
            if not 0 <= di <= ei:
                raise ValueError("thresholds must satisfy 0 <= d_i <= e_i")
            if ei > comb(self.k, i) * room:
                raise ValueError("padding too small for thresholds")
        if self.block_length == 0:
            raise ValueError("empty block cannot emit anything")


def build_block(bp: BernsteinPair) -> BlockSimulation:
    """Choose the least padding that fits the thresholds.

    r is the smallest integer with e_i <= C(k, i) * C(2r, r) for every i.
    """
    r = 0
    while any(
        ei > comb(bp.degree, i) * comb(2 * r, r) for i, ei in enumerate(bp.e)
    ):
        r += 1
    return BlockSimulation(bp.degree, r, bp.d, bp.e)


def classify_block(sim: BlockSimulation, word) -> int | None:
    """Label emitted by one block: 1, 0, or None for a discard.

    The pair number is 1-based: rank(v) * C(2r, r) + rank(w) + 1, compared
    against the thresholds of the payload weight class.
    """
    word = tuple(word)
    if len(word) != sim.block_length:
        raise LengthMismatch(
            f"expected {sim.block_length} bits, got {len(word)}"
        )
    payload, padding = word[:sim.k], word[sim.k:]
    if sum(padding) != sim.r:
        return None
    i = sum(payload)
    number = rank_word(payload) * comb(2 * sim.r, sim.r) + rank_word(padding) + 1
    if number <= sim.d[i]:
        return 1
    if number <= sim.e[i]:
        return 0
    return None


def run_block(
    sim: BlockSimulation, src: BitSource, step_cap: int = DEFAULT_STEP_CAP
) -> tuple[int, int]:
    """Read blocks until one is kept; returns (label, bits consumed)."""
    consumed = 0
    while True:
        if consumed + sim.block_length > step_cap:
            raise StepCapExceeded(step_cap)
        word = tuple(src.next_bit() for _ in range(sim.block_length))
        consumed += sim.block_length
        label = classify_block(sim, word)
        if label is not None:
            return label, consumed


def exact_distribution(sim: BlockSimulation) -> RationalFunction:
    """Closed-form conditional label-1 probability.

    The padding factor p^r q^r is common to every kept block and cancels,
    leaving sum(d_i p^i q^(k-i)) / sum(e_i p^i q^(k-i)).
    """
    num = HomogeneousPoly(sim.k, sim.d).dehomogenize()
    den = HomogeneousPoly(sim.k, sim.e).dehomogenize()
    return RationalFunction.of(num, den)


def brute_force_distribution(sim: BlockSimulation) -> RationalFunction:
    """Independent check: enumerate all 2^block_length words, classify each,
    and add up exact word measures per label."""
    from .ratfunc import IntPolynomial, ZERO_POLY

    length = sim.block_length
    if length > 24:
        raise ValueError("enumeration only intended for short blocks")
    p_pow = IntPolynomial((0, 1))
    q_pow = IntPolynomial((1, -1))
    ones_mass = ZERO_POLY
    kept_mass = ZERO_POLY
    for code in range(1 << length):
        word = tuple((code >> (length - 1 - i)) & 1 for i in range(length))
        label = classify_block(sim, word)
        if label is None:
            continue
        measure = (p_pow ** sum(word)) * (q_pow ** (length - sum(word)))
        kept_mass = kept_mass + measure
        if label == 1:
            ones_mass = ones_mass + measure
    return RationalFunction.of(ones_mass, kept_mass)


def keep_probability(sim: BlockSimulation, p) -> Fraction:
    """Exact probability that a single block emits a label at bias p."""
    p = Fraction(p)
    q = 1 - p
    payload = sum(
        ei * p**i * q ** (sim.k - i) for i, ei in enumerate(sim.e)
    )
    return (p * q) ** sim.r * payload


def rational_to_block(f: RationalFunction, cap: int = 200) -> BlockSimulation:
    """Full pipeline from a rational target to a runnable block procedure."""
    return build_block(bernstein_from_rational(f, cap))
