"""Finite-state machines driven by coin tosses.

A machine reads independent tosses of a p-coin and walks a transition
table; final states are absorbing and carry output labels.  The probability
of ending with a given label satisfies, state by state, the one-step
averaging relation F(s) = p F(s after 1) + (1-p) F(s after 0), which pins
the label probabilities down as rational functions of p.  Extraction solves
that linear system exactly with determinant ratios computed by fraction-free
elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bitsource import BitSource
from .errors import NonHaltingState, StepCapExceeded, UnknownName
from .ratfunc import (
    IntPolynomial,
    ONE_POLY,
    RationalFunction,
    RF_ONE,
    ZERO_POLY,
    poly_det,
)

P = IntPolynomial((0, 1))
Q = IntPolynomial((1, -1))  # 1 - p

DEFAULT_STEP_CAP = 2**32


def word_measure(word, p) -> Fraction:
    """Exact probability of a bit word under bias p."""
    p = Fraction(p)
    ones = sum(word)
    return p**ones * (1 - p) ** (len(word) - ones)


@dataclass(frozen=True)
class FiniteCoinAutomaton:
    """Transition table with absorbing labeled finals.

    delta[s][b] is the successor of state s on toss b; outputs maps each
    final state to its label.  States are 0..state_count-1, start included.
    """

    state_count: int
    start: int
    delta: tuple[tuple[int, ...], ...]
    outputs: dict[int, int]
    alphabet_size: int = 2

    def is_final(self, state: int) -> bool:
        return state in self.outputs

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.outputs.values())))


def _check_shape(a: FiniteCoinAutomaton) -> None:
    if not 0 <= a.start < a.state_count:
        raise ValueError("start state out of range")
    if len(a.delta) != a.state_count:
        raise ValueError("delta must have one row per state")
    for s, row in enumerate(a.delta):
        if len(row) != a.alphabet_size:
            raise ValueError(f"state {s}: need {a.alphabet_size} successors")
        for t in row:
            if not 0 <= t < a.state_count:
                raise ValueError(f"state {s}: successor {t} out of range")
    for s, label in a.outputs.items():
        if not 0 <= s < a.state_count:
            raise ValueError(f"final state {s} out of range")
        if label < 0:
            raise ValueError("labels must be nonnegative")
        if any(t != s for t in a.delta[s]):
            raise ValueError(f"final state {s} is not absorbing")


def validate(a: FiniteCoinAutomaton) -> FiniteCoinAutomaton:
    """Prune unreachable states and certify that every run can halt.

    Keeps exactly the states reachable from the start (relative order
    preserved) and raises NonHaltingState if any of them cannot reach a
    final state, since such a state would trap the run forever.
    """
    _check_shape(a)
    reachable = {a.start}
    frontier = [a.start]
    while frontier:
        s = frontier.pop()
        for t in a.delta[s]:
            if t not in reachable:
                reachable.add(t)
                frontier.append(t)
    # walk backwards from the finals inside the reachable part
    reverse: dict[int, set[int]] = {s: set() for s in reachable}
    for s in reachable:
        for t in a.delta[s]:
            reverse[t].add(s)
    can_halt = {s for s in reachable if s in a.outputs}
    frontier = list(can_halt)
    while frontier:
        s = frontier.pop()
        for t in reverse[s]:
            if t not in can_halt:
                can_halt.add(t)
                frontier.append(t)
    stuck = reachable - can_halt
    if stuck:
        raise NonHaltingState(min(stuck))
    kept = sorted(reachable)
    index = {s: i for i, s in enumerate(kept)}
    return FiniteCoinAutomaton(
        state_count=len(kept),
        start=index[a.start],
        delta=tuple(
            tuple(index[a.delta[s][b]] for b in range(a.alphabet_size)) for s in kept
        ),
        outputs={index[s]: a.outputs[s] for s in kept if s in a.outputs},
        alphabet_size=a.alphabet_size,
    )


def run(
    a: FiniteCoinAutomaton, src: BitSource, step_cap: int = DEFAULT_STEP_CAP
) -> tuple[int, int]:
    """Feed tosses until absorption; returns (label, bits consumed)."""
    state = a.start
    steps = 0
    while state not in a.outputs:
        if steps >= step_cap:
            raise StepCapExceeded(step_cap)
        state = a.delta[state][src.next_bit()]
        steps += 1
    return a.outputs[state], steps


def extract_rational(a: FiniteCoinAutomaton) -> list[RationalFunction]:
    """Exact label probabilities as functions of p, one entry per label.

    For each label the averaging relations form a square linear system over
    Z[p] whose unique solution is read off at the start state by Cramer's
    rule; both determinants come from fraction-free elimination, so the
    arithmetic stays in integer polynomials throughout.  The results always
    sum to one and have degrees bounded by the state count.
    """
    a = validate(a)
    if a.alphabet_size != 2:
        raise ValueError("extraction is defined for two-letter machines")
    interior = [s for s in range(a.state_count) if s not in a.outputs]
    col = {s: i for i, s in enumerate(interior)}
    n = len(interior)
    matrix = [[ZERO_POLY] * n for _ in range(n)]
    for i, s in enumerate(interior):
        matrix[i][i] = ONE_POLY
        for bit, weight in ((1, P), (0, Q)):
            t = a.delta[s][bit]
            if t in col:
                matrix[i][col[t]] = matrix[i][col[t]] - weight

    labels = a.labels
    max_label = labels[-1] if labels else 0
    results: list[RationalFunction] = []
    det_a = poly_det(matrix)
    for label in range(max_label + 1):
        if a.start in a.outputs:
            results.append(
                RF_ONE if a.outputs[a.start] == label else RationalFunction.of(()))
            continue
        rhs = []
        for s in interior:
            b = ZERO_POLY
            for bit, weight in ((1, P), (0, Q)):
                t = a.delta[s][bit]
                if a.outputs.get(t) == label:
                    b = b + weight
            rhs.append(b)
        replaced = [row[:] for row in matrix]
        j = col[a.start]
        for i in range(n):
            replaced[i][j] = rhs[i]
        results.append(RationalFunction.of(poly_det(replaced), det_a))

    total = results[0]
    for f in results[1:]:
        total = total + f
    if total != RF_ONE:
        raise AssertionError("label probabilities do not sum to one")
    return results


def relabel_complement(a: FiniteCoinAutomaton) -> FiniteCoinAutomaton:
    """Swap output labels 0 and 1, leaving everything else alone."""
    swap = {0: 1, 1: 0}
    return FiniteCoinAutomaton(
        state_count=a.state_count,
        start=a.start,
        delta=a.delta,
        outputs={s: swap.get(label, label) for s, label in a.outputs.items()},
        alphabet_size=a.alphabet_size,
    )


def builtin(name: str) -> FiniteCoinAutomaton:
    """Small reference machines.

    von_neumann: toss pairs, 01 gives 0 and 10 gives 1, equal pairs retry;
    the label-1 probability is 1/2 whatever the bias.
    square: two tosses, 11 gives 1 and anything else 0, so p^2.
    ratio: toss pairs, 00 gives 0 and 11 gives 1, mixed pairs retry, so
    p^2 / (p^2 + (1-p)^2).
    """
    if name == "von_neumann":
        delta = ((1, 2), (0, 3), (4, 0), (3, 3), (4, 4))
    elif name == "square":
        delta = ((1, 2), (3, 3), (3, 4), (3, 3), (4, 4))
    elif name == "ratio":
        delta = ((1, 2), (3, 0), (0, 4), (3, 3), (4, 4))
    else:
        raise UnknownName(f"unknown builtin machine {name!r}")
    return FiniteCoinAutomaton(
        state_count=5, start=0, delta=delta, outputs={3: 0, 4: 1}
    )

BUILTIN_NAMES = ("von_neumann", "square", "ratio")
