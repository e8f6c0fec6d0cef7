"""Block procedures that emit one of several letters instead of a bit.

The input alphabet has s letters with unknown probabilities x_0..x_(s-1)
summing to one; targets are rational functions of those probabilities.  A
vector (f_0, ..., f_t) summing to one is realized recursively: a two-output
stage separates letter 0 (conditional probability f_0) from the rest, and a
tail procedure for the renormalized vector (f_1, ..., f_t) / (1 - f_0)
picks among the remaining letters.  A combined block concatenates the two
words and keeps only blocks where both stages decide, which preserves the
conditional distribution exactly.

Each stage generalizes the binary block construction: payload words are
grouped by letter-count type, padding words must contain every letter
exactly r times, and pair numbers within a type class are compared against
nonnegative threshold maps obtained by simplex positivization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import InvalidRange, LengthMismatch, NotAProbabilityVector
from .multivar import (
    MultiRational,
    compositions,
    homogenize_to,
    m_eval,
    m_strip,
    m_sub,
    m_total_degree,
    multinomial,
    polya_multi,
    simplex_mul,
)
from .ratfunc import RationalFunction


def word_type(word, s: int) -> tuple[int, ...]:
    counts = [0] * s
    for letter in word:
        if not 0 <= letter < s:
            raise LengthMismatch(f"letter {letter!r} outside alphabet of size {s}")
        counts[letter] += 1
    return tuple(counts)


def rank_typed(word, counts) -> int:
    """Position of a word among all words of its letter-count type, in
    lexicographic order; bijective onto 0..multinomial(counts)-1."""
    remaining = list(counts)
    rank = 0
    for letter in word:
        for smaller in range(letter):
            if remaining[smaller] > 0:
                remaining[smaller] -= 1
                rank += multinomial(remaining)
                remaining[smaller] += 1
        remaining[letter] -= 1
        if remaining[letter] < 0:
            raise LengthMismatch("word does not match its type")
    return rank


def unrank_typed(rank: int, counts) -> tuple[int, ...]:
    """Inverse of rank_typed."""
    remaining = list(counts)
    total = sum(counts)
    out = []
    for _ in range(total):
        for letter in range(len(remaining)):
            if remaining[letter] == 0:
                continue
            remaining[letter] -= 1
            block = multinomial(remaining)
            if rank < block:
                out.append(letter)
                break
            rank -= block
            remaining[letter] += 1
        else:
            raise LengthMismatch("rank out of range")
    return tuple(out)


@dataclass
class DiceStage:
    """One two-way stage: letter 0 with conditional probability d-sum/e-sum."""

    s: int
    k: int
    r: int
    d: dict
    e: dict

    @property
    def block_length(self) -> int:
        return self.k + self.s * self.r

    @property
    def pad_count(self) -> int:
        return multinomial((self.r,) * self.s)

    def classify(self, word) -> int | None:
        word = tuple(word)
        if len(word) != self.block_length:
            raise LengthMismatch(
                f"expected {self.block_length} letters, got {len(word)}"
            )
        payload, padding = word[:self.k], word[self.k:]
        if word_type(padding, self.s) != (self.r,) * self.s:
            return None
        ptype = word_type(payload, self.s)
        number = (
            rank_typed(payload, ptype) * self.pad_count
            + rank_typed(padding, (self.r,) * self.s)
            + 1
        )
        if number <= self.d.get(ptype, 0):
            return 0
        if number <= self.e.get(ptype, 0):
            return 1
        return None

    def distribution(self) -> MultiRational:
        """Conditional probability of emitting 0, as a function of the
        letter probabilities (padding factors cancel)."""
        num = m_strip({a: c for a, c in self.d.items()})
        den = m_strip({a: c for a, c in self.e.items()})
        return MultiRational.of(self.s, num, den)


@dataclass
class DiceBlockSimulation:
    """Recursive block procedure emitting letters 0..outputs-1."""

    s: int
    head: DiceStage
    tail: "DiceBlockSimulation | None" = None

    @property
    def outputs(self) -> int:
        return 2 if self.tail is None else 1 + self.tail.outputs

    @property
    def block_length(self) -> int:
        extra = self.tail.block_length if self.tail is not None else 0
        return self.head.block_length + extra

    def classify(self, word) -> int | None:
        word = tuple(word)
        if len(word) != self.block_length:
            raise LengthMismatch(
                f"expected {self.block_length} letters, got {len(word)}"
            )
        if self.tail is None:
            return self.head.classify(word)
        first = self.head.classify(word[:self.head.block_length])
        if first is None:
            return None
        rest = self.tail.classify(word[self.head.block_length:])
        if rest is None:
            return None
        return 0 if first == 0 else 1 + rest

    def distributions(self) -> list[MultiRational]:
        """Exact conditional output probabilities."""
        f0 = self.head.distribution()
        if self.tail is None:
            one = MultiRational.constant(self.s, 1)
            return [f0, one - f0]
        one = MultiRational.constant(self.s, 1)
        rest = self.tail.distributions()
        return [f0] + [(one - f0) * g for g in rest]

    def distributions_univariate(self) -> list[RationalFunction]:
        """Binary-input special case, with x_1 = p."""
        return [g.to_univariate() for g in self.distributions()]


def _build_stage(f: MultiRational, cap: int) -> DiceStage:
    """Certify 0 < f < 1 on the open simplex and lay out one stage."""
    s = f.s
    k = max(m_total_degree(f.num), m_total_degree(f.den))
    num_h = homogenize_to(f.num, s, k)
    den_h = homogenize_to(f.den, s, k)
    center = (Fraction(1, s),) * s
    dv = m_eval(den_h, center)
    if dv == 0:
        raise InvalidRange("denominator vanishes at the simplex center")
    if dv < 0:
        num_h = {a: -c for a, c in num_h.items()}
        den_h = {a: -c for a, c in den_h.items()}
    nv = m_eval(num_h, center)
    if not 0 < nv < m_eval(den_h, center):
        raise InvalidRange("target leaves (0, 1) at the simplex center")
    gap_h = m_sub(den_h, num_h)
    n = max(
        polya_multi(num_h, s, cap),
        polya_multi(gap_h, s, cap),
        polya_multi(den_h, s, cap),
    )
    for _ in range(n):
        num_h = simplex_mul(num_h, s)
        den_h = simplex_mul(den_h, s)
    k += n
    d = m_strip(num_h)
    e = m_strip(den_h)
    r = 0
    while any(
        c > multinomial(a) * multinomial((r,) * s) for a, c in e.items()
    ):
        r += 1
    return DiceStage(s, k, r, d, e)


def _as_multirational(f, s: int | None) -> MultiRational:
    if isinstance(f, MultiRational):
        return f
    if isinstance(f, RationalFunction):
        if s not in (None, 2):
            raise ValueError("univariate targets imply a two-letter alphabet")
        return MultiRational.from_univariate(f)
    return MultiRational.constant(s or 2, f)


def dice_rational_to_block(
    fs, cap: int = 200, s: int | None = None
) -> DiceBlockSimulation:
    """Build a block procedure for a vector of rational targets.

    fs may hold univariate RationalFunctions (two-letter alphabet, variable
    p meaning the probability of letter 1) or MultiRationals over a common
    alphabet.  The entries must sum identically to one.
    """
    lifted = [_as_multirational(f, s) for f in fs]
    if len(lifted) < 2:
        raise NotAProbabilityVector("need at least two outputs")
    sizes = {g.s for g in lifted}
    if len(sizes) != 1:
        raise NotAProbabilityVector("targets disagree about the alphabet size")
    s_val = sizes.pop()
    total = lifted[0]
    for g in lifted[1:]:
        total = total + g
    if not total.equals_on_simplex(MultiRational.constant(s_val, 1)):
        raise NotAProbabilityVector("targets do not sum to one")

    def build(vec: list[MultiRational]) -> DiceBlockSimulation:
        head = _build_stage(vec[0], cap)
        if len(vec) == 2:
            return DiceBlockSimulation(s_val, head)
        one = MultiRational.constant(s_val, 1)
        rest = [g / (one - vec[0]) for g in vec[1:]]
        return DiceBlockSimulation(s_val, head, build(rest))

    return build(lifted)


def letter_measures_at(
    sim: DiceBlockSimulation, point
) -> tuple[list[Fraction], Fraction]:
    """Exact per-block outcome probabilities at fixed letter probabilities:
    (mass of each output letter, discard mass).  Enumerates every word, so
    only meant for short blocks."""
    point = tuple(Fraction(x) for x in point)
    if len(point) != sim.s:
        raise LengthMismatch("need one probability per letter")
    masses = [Fraction(0)] * sim.outputs
    discard = Fraction(0)
    for word in product(range(sim.s), repeat=sim.block_length):
        measure = Fraction(1)
        for letter in word:
            measure *= point[letter]
        label = sim.classify(word)
        if label is None:
            discard += measure
        else:
            masses[label] += measure
    return masses, discard
