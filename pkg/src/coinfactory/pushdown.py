"""Pushdown machines driven by coin tosses, and their exact values.

A machine owns a finite control, a finite stack alphabet, and a transition
table indexed by (state, input letter, top-of-stack symbol); each move
rewrites the top symbol by a word of length at most two.  The run halts
when the stack empties, and the label of the state reached there is the
output.  Such machines leave the rational world: composing a ladder-shaped
stack walk with a block procedure yields a machine whose label-1
probability is exactly sqrt(p).

The quantitative object is the family of pop matrices: entry (s, s') of
the matrix for stack symbol b is the probability that, starting in state s
with b on top, the first net pop of that symbol happens in state s'.
These matrices satisfy a quadratic fixed-point system; iterating the
system from zero climbs monotonically to the least solution, but at the
symmetric ladder the climb is only harmonic, so tight tolerances use
logarithmic reduction on the equivalent quadratic matrix equation
G = D + K G + U G^2, which keeps converging linearly even in that
boundary-recurrent case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bitsource import BitSource
from .dice import DiceBlockSimulation, dice_rational_to_block
from .errors import (
    AlphabetMismatch,
    DidNotHalt,
    InvalidRange,
    IterCapExceeded,
    NotAlmostSurelyHalting,
    UndefinedFinal,
)
from .ratfunc import RationalFunction, bernstein_from_rational

DEFAULT_TOL = 1e-12
DEFAULT_ITER_CAP = 10**6
DEFAULT_STEP_CAP = 10**8
HALT_TOL = 1e-9


@dataclass
class BlockDrive:
    """Provenance of a machine built by feeding block-procedure letters to
    an inner machine; lets harnesses simulate at block granularity."""

    dice: DiceBlockSimulation
    inner: "PushdownCoinAutomaton"
    wrapper: str | None = None  # "sqrt_complement" for the one-bit shortcut


@dataclass
class PushdownCoinAutomaton:
    """Stack machine; transitions[(state, letter, symbol)] = (state, word).

    Replacement words are written top first.  finals maps states to output
    labels consulted only at the moment the stack empties; states stay
    live while the stack is nonempty, so finals need transitions too.
    symbol_distribution gives the input-letter probabilities as functions
    of the coin bias p; None means a plain p-coin (letters 0 and 1 with
    probabilities 1-p and p).
    """

    state_count: int
    input_alphabet_size: int
    stack_symbols: int
    start: int
    initial_stack: tuple[int, ...]
    transitions: dict
    finals: dict
    symbol_distribution: tuple[RationalFunction, ...] | None = None
    block_structure: BlockDrive | None = field(default=None, compare=False)

    def letter_probabilities(self, p: float) -> tuple[float, ...]:
        if self.symbol_distribution is None:
            return (1.0 - p, float(p))
        exact = Fraction(p)
        return tuple(float(f.eval(exact)) for f in self.symbol_distribution)


def check_pushdown(m: PushdownCoinAutomaton) -> None:
    """Structural validation: total transitions, everything in range."""
    if not 0 <= m.start < m.state_count:
        raise ValueError("start state out of range")
    for sym in m.initial_stack:
        if not 0 <= sym < m.stack_symbols:
            raise ValueError("initial stack symbol out of range")
    if m.symbol_distribution is not None:
        if len(m.symbol_distribution) != m.input_alphabet_size:
            raise ValueError("need one probability function per input letter")
    for s in range(m.state_count):
        for i in range(m.input_alphabet_size):
            for b in range(m.stack_symbols):
                key = (s, i, b)
                if key not in m.transitions:
                    raise ValueError(f"missing transition for {key}")
                t, rep = m.transitions[key]
                if not 0 <= t < m.state_count:
                    raise ValueError(f"transition {key}: target out of range")
                for c in rep:
                    if not 0 <= c < m.stack_symbols:
                        raise ValueError(f"transition {key}: bad stack symbol")
    for s, label in m.finals.items():
        if not 0 <= s < m.state_count or label < 0:
            raise ValueError("bad final state or label")


def pda_run(
    m: PushdownCoinAutomaton, src: BitSource, step_cap: int = DEFAULT_STEP_CAP
) -> tuple[int, int]:
    """Drive the machine letter by letter; returns (label, letters consumed).

    Raises DidNotHalt when the budget runs out with a nonempty stack; for
    boundary-recurrent walks that is an expected, reportable outcome.
    """
    if m.symbol_distribution is None and m.input_alphabet_size == 2:
        draw = src.next_bit
    else:
        probs = m.letter_probabilities(src.bias)
        edges = np.cumsum(probs[:-1])

        def draw() -> int:
            return int(np.searchsorted(edges, src.uniform(), side="right"))

    state = m.start
    stack = list(reversed(m.initial_stack))  # top kept at the end
    steps = 0
    while stack:
        if steps >= step_cap:
            raise DidNotHalt(step_cap, steps)
        state, rep = m.transitions[(state, draw(), stack.pop())]
        stack.extend(reversed(rep))
        steps += 1
    if state not in m.finals:
        raise UndefinedFinal(state)
    return m.finals[state], steps


@dataclass
class PopSolution:
    """Pop matrices at a fixed bias, plus solver diagnostics."""

    p: float
    matrices: np.ndarray  # shape (stack_symbols, states, states)
    iterations: int
    method: str
    residual: float

    def matrix(self, symbol: int = 0) -> np.ndarray:
        return self.matrices[symbol]

    def goodness(self) -> np.ndarray:
        """Row sums: probability of ever popping, per (symbol, state)."""
        return self.matrices.sum(axis=2)

    def min_goodness(self) -> tuple[float, tuple[int, int]]:
        sums = self.goodness()
        flat = int(np.argmin(sums))
        b, s = divmod(flat, sums.shape[1])
        return float(sums[b, s]), (b, s)

    def word_transfer(self, word) -> np.ndarray:
        """Pop matrix for a whole stack word (top first): the product of
        the per-symbol matrices in word order."""
        n = self.matrices.shape[1]
        out = np.eye(n)
        for sym in word:
            out = out @ self.matrices[sym]
        return out


def _is_quadratic_single_symbol(m: PushdownCoinAutomaton) -> bool:
    return m.stack_symbols == 1 and all(
        len(rep) <= 2 for _, rep in m.transitions.values()
    )


def _qbd_blocks(m: PushdownCoinAutomaton, probs) -> tuple[np.ndarray, ...]:
    n = m.state_count
    down = np.zeros((n, n))
    keep = np.zeros((n, n))
    up = np.zeros((n, n))
    for (s, i, _b), (t, rep) in m.transitions.items():
        c = probs[i]
        if len(rep) == 0:
            down[s, t] += c
        elif len(rep) == 1:
            keep[s, t] += c
        else:
            up[s, t] += c
    return down, keep, up


def _lr_core(down, keep, up, tol: float, iter_cap: int):
    """Logarithmic reduction for the minimal solution of
    G = down + keep G + up G^2; each sweep squares the horizon."""
    n = down.shape[0]
    eye = np.eye(n)
    lead = np.linalg.solve(eye - keep, np.concatenate([down, up], axis=1))
    low, high = lead[:, :n], lead[:, n:]
    g = low.copy()
    t = high.copy()
    sweeps = min(iter_cap, 200)
    for sweep in range(1, sweeps + 1):
        mixed = high @ low + low @ high
        block = np.linalg.solve(
            eye - mixed, np.concatenate([low @ low, high @ high], axis=1)
        )
        low, high = block[:, :n], block[:, n:]
        increment = t @ low
        g += increment
        t = t @ high
        if float(np.abs(increment).max()) < tol / 2:
            return g, sweep
    raise IterCapExceeded(sweeps, float(np.abs(t @ low).max()))


def _mean_drift(down, keep, up) -> float:
    """Expected stack growth per step under the stationary law of the
    control chain; negative means recurrent, zero boundary recurrent."""
    a = down + keep + up
    n = a.shape[0]
    system = (a - np.eye(n)).T.copy()
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        theta = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        theta, *_ = np.linalg.lstsq(
            np.vstack([(a - np.eye(n)).T, np.ones(n)]),
            np.append(np.zeros(n), 1.0),
            rcond=None,
        )
    return float(theta @ (up - down) @ np.ones(n))


def _solve_qbd(down, keep, up, tol: float, iter_cap: int):
    """Pop matrix of a quadratic (one-symbol) machine.

    Plain logarithmic reduction loses half its digits at a boundary
    recurrent walk because the pencil has a unit root on both sides.
    When the drift says the walk is recurrent the pop matrix is
    stochastic, so that root can be deflated exactly: with E = e u for
    any probability row u, G - E solves the quadratic with coefficients
    (down (I - E), keep + up E, up), and that shifted problem converges
    at full precision.  Returns (G, sweeps, residual).
    """
    n = down.shape[0]
    drift = _mean_drift(down, keep, up)
    if drift <= 1e-12:
        shift = np.full((n, n), 1.0 / n)
        g, sweeps = _lr_core(
            down - down @ shift, keep + up @ shift, up, tol, iter_cap
        )
        g = g + shift
    else:
        g, sweeps = _lr_core(down, keep, up, tol, iter_cap)
    residual = float(np.abs(down + keep @ g + up @ (g @ g) - g).max())
    return g, sweeps, residual


def _jacobi_tables(m: PushdownCoinAutomaton):
    """Precompute gather tables: for each (symbol, letter) the target state
    and replacement word of every state's transition."""
    tables = {}
    for b in range(m.stack_symbols):
        for i in range(m.input_alphabet_size):
            targets = np.empty(m.state_count, dtype=np.int64)
            reps = []
            for s in range(m.state_count):
                t, rep = m.transitions[(s, i, b)]
                targets[s] = t
                reps.append(tuple(rep))
            tables[(b, i)] = (targets, reps)
    return tables


def _apply_pop_map(tables, probs, mats: np.ndarray) -> np.ndarray:
    """One application of the fixed-point map defining the pop matrices."""
    n = mats.shape[1]
    eye = np.eye(n)
    word_mats: dict[tuple, np.ndarray] = {(): eye}
    for targets, reps in tables.values():
        for rep in reps:
            if rep not in word_mats:
                acc = mats[rep[0]]
                for sym in rep[1:]:
                    acc = acc @ mats[sym]
                word_mats[rep] = acc
    new = np.zeros_like(mats)
    for (b, i), (targets, reps) in tables.items():
        c = probs[i]
        if c == 0.0:
            continue
        rows = np.empty((n, n))
        for s in range(n):
            rows[s] = word_mats[reps[s]][targets[s]]
        new[b] += c * rows
    return new


def _solve_jacobi(m: PushdownCoinAutomaton, probs, tol, iter_cap):
    """Monotone iteration from zero; converges to the least solution from
    below, with every iterate a valid truncated-run probability."""
    mats = np.zeros((m.stack_symbols, m.state_count, m.state_count))
    tables = _jacobi_tables(m)
    delta = float("inf")
    for iteration in range(1, iter_cap + 1):
        new = _apply_pop_map(tables, probs, mats)
        delta = float(np.abs(new - mats).max())
        if float((mats - new).max()) > 1e-12:
            raise AssertionError("monotone iteration decreased")
        mats = new
        if delta < tol:
            return mats, iteration, delta
    raise IterCapExceeded(iter_cap, delta)


def _structured_pop(m: PushdownCoinAutomaton, p: float, tol, iter_cap):
    """Pop matrices of a block-driven machine, via its inner machine.

    At block granularity the composed machine replays the inner one with
    letter probabilities equal to the block's conditional output law
    (discarded blocks are identity moves and cannot change what is ever
    popped), so boundary rows come from the small inner solve; rows for
    partially read blocks then follow by averaging over the remaining
    bits, deepest prefixes first.
    """
    drive = m.block_structure
    sim, inner = drive.dice, drive.inner
    exact_p = Fraction(p)
    inner_probs = tuple(
        float(f.eval(exact_p)) for f in sim.distributions_univariate()
    )
    inner_mats, iterations, _method, _res = _solve_machine(
        inner, p, inner_probs, tol, iter_cap, "auto"
    )
    n_inner = inner.state_count
    length = sim.block_length
    index, prefix_count = _prefix_index(length)
    shift = 2 if drive.wrapper == "sqrt_complement" else 0
    total = prefix_count * n_inner + shift
    bit_probs = (1.0 - p, float(p))

    transfers: dict[tuple, np.ndarray] = {}

    def transfer(rep: tuple) -> np.ndarray:
        if rep not in transfers:
            acc = np.eye(n_inner)
            for sym in rep:
                acc = acc @ inner_mats[sym]
            transfers[rep] = acc
        return transfers[rep]

    mats = np.zeros((m.stack_symbols, total, total))
    for b in range(m.stack_symbols):
        g = mats[b]
        for s in range(n_inner):
            g[shift + s, shift : shift + n_inner] = inner_mats[b][s]
        for l in range(length - 1, 0, -1):
            for value in range(1 << l):
                prefix = tuple((value >> (l - 1 - j)) & 1 for j in range(l))
                base = shift + index(prefix) * n_inner
                for s in range(n_inner):
                    row = g[base + s]
                    for bit in (0, 1):
                        c = bit_probs[bit]
                        word = prefix + (bit,)
                        if len(word) < length:
                            row += c * g[shift + index(word) * n_inner + s]
                            continue
                        letter = sim.classify(word)
                        if letter is None:
                            row += c * g[shift + s]
                            continue
                        t, rep = inner.transitions[(s, letter, b)]
                        row[shift : shift + n_inner] += c * transfer(rep)[t]
        if shift:
            g[1, 1] = 1.0
            g[0, 1] = bit_probs[1]
            g[0] += bit_probs[0] * g[shift + inner.start]
    tables = _jacobi_tables(m)
    residual = float(
        np.abs(_apply_pop_map(tables, bit_probs, mats) - mats).max()
    )
    return mats, iterations, "block-lr", residual


def _solve_machine(m, p, probs, tol, iter_cap, method):
    if method not in ("auto", "jacobi", "lr"):
        raise ValueError(f"unknown method {method!r}")
    if method != "jacobi" and m.block_structure is not None:
        return _structured_pop(m, p, tol, iter_cap)
    use_lr = method == "lr" or (
        method == "auto" and _is_quadratic_single_symbol(m)
    )
    if use_lr and not _is_quadratic_single_symbol(m):
        raise ValueError("logarithmic reduction needs one stack symbol")
    if use_lr:
        down, keep, up = _qbd_blocks(m, probs)
        g, iterations, residual = _solve_qbd(down, keep, up, tol, iter_cap)
        return g[np.newaxis, :, :], iterations, "lr", residual
    mats, iterations, delta = _solve_jacobi(m, probs, tol, iter_cap)
    return mats, iterations, "jacobi", delta


def pop_probabilities(
    m: PushdownCoinAutomaton,
    p: float,
    tol: float = DEFAULT_TOL,
    iter_cap: int = DEFAULT_ITER_CAP,
    method: str = "auto",
) -> PopSolution:
    """Solve for the pop matrices at bias p.

    method "auto" picks, in order: the block-structured route when the
    machine records how it was composed, logarithmic reduction when the
    machine uses a single stack symbol and short replacements (all
    built-ins do), and otherwise the monotone iteration from below;
    "jacobi" forces the latter.  The reported residual is always measured
    on the machine's own fixed-point system.
    """
    check_pushdown(m)
    probs = m.letter_probabilities(p)
    mats, iterations, used, residual = _solve_machine(
        m, p, probs, tol, iter_cap, method
    )
    return PopSolution(p, mats, iterations, used, residual)


def pda_value(
    m: PushdownCoinAutomaton,
    p: float,
    tol: float = DEFAULT_TOL,
    iter_cap: int = DEFAULT_ITER_CAP,
    halt_tol: float = HALT_TOL,
) -> float:
    """Probability that the machine halts with label 1 at bias p.

    Refuses with NotAlmostSurelyHalting when any (symbol, state) pair
    fails to pop almost surely, since the output distribution would then
    be defective.
    """
    sol = pop_probabilities(m, p, tol=tol, iter_cap=iter_cap)
    worst, (b, s) = sol.min_goodness()
    if worst < 1.0 - halt_tol:
        raise NotAlmostSurelyHalting(b, s, worst)
    transfer = sol.word_transfer(m.initial_stack)
    value = 0.0
    for state, label in m.finals.items():
        if label == 1:
            value += float(transfer[m.start, state])
    return value


def build_ladder_pda(
    g: RationalFunction, down: RationalFunction | None = None
) -> PushdownCoinAutomaton:
    """Two-column stack walk over the letters (0, 1, 2).

    Letter 2 pushes (up), letter 0 pops (down), letter 1 switches between
    the left and right columns; the stack starts one symbol high.  Letter
    probabilities are (down(p), 1 - g(p) - down(p), g(p)) with down
    defaulting to g, the symmetric walk.  Halting at the left column gives
    label 1, whose probability solves gamma = 1 - gamma + 2 g gamma^2 in
    the symmetric case.
    """
    if down is None:
        down = g
    one = RationalFunction.of((1,))
    level = one - g - down
    for part in (g, down, level):
        bernstein_from_rational(part)  # certifies the open-interval range
    x = 0
    transitions = {}
    for s in (0, 1):
        transitions[(s, 0, x)] = (s, ())
        transitions[(s, 1, x)] = (1 - s, (x,))
        transitions[(s, 2, x)] = (s, (x, x))
    m = PushdownCoinAutomaton(
        state_count=2,
        input_alphabet_size=3,
        stack_symbols=1,
        start=0,
        initial_stack=(x,),
        transitions=transitions,
        finals={0: 1, 1: 0},
        symbol_distribution=(down, level, g),
    )
    check_pushdown(m)
    return m


def _prefix_index(length_limit: int):
    """Enumerate proper binary prefixes: id((b_1..b_l)) = 2^l - 1 + value."""

    def index(bits: tuple[int, ...]) -> int:
        value = 0
        for b in bits:
            value = 2 * value + b
        return (1 << len(bits)) - 1 + value

    count = (1 << length_limit) - 1
    return index, count


def compose_with_block(
    sim: DiceBlockSimulation, inner: PushdownCoinAutomaton
) -> PushdownCoinAutomaton:
    """Drive an s-letter machine with letters emitted by a block procedure.

    The result reads raw bits: control states pair the partial block read
    so far with the inner state; completed blocks either apply one inner
    transition or, on a discard, vanish without a trace.  The composed
    machine touches its stack only at block boundaries, so it halts only
    after whole blocks.
    """
    if sim.outputs != inner.input_alphabet_size:
        raise AlphabetMismatch(
            f"block emits {sim.outputs} letters, machine reads "
            f"{inner.input_alphabet_size}"
        )
    if sim.s != 2:
        raise AlphabetMismatch("composition reads raw bits; need a binary block")
    length = sim.block_length
    index, prefix_count = _prefix_index(length)
    n_inner = inner.state_count

    def state_id(prefix: tuple[int, ...], s: int) -> int:
        return index(prefix) * n_inner + s

    transitions = {}
    for l in range(length):
        for value in range(1 << l):
            prefix = tuple((value >> (l - 1 - j)) & 1 for j in range(l))
            for s in range(n_inner):
                for bit in (0, 1):
                    word = prefix + (bit,)
                    if len(word) < length:
                        for b in range(inner.stack_symbols):
                            transitions[(state_id(prefix, s), bit, b)] = (
                                state_id(word, s),
                                (b,),
                            )
                        continue
                    letter = sim.classify(word)
                    for b in range(inner.stack_symbols):
                        if letter is None:
                            transitions[(state_id(prefix, s), bit, b)] = (
                                state_id((), s),
                                (b,),
                            )
                        else:
                            t, rep = inner.transitions[(s, letter, b)]
                            transitions[(state_id(prefix, s), bit, b)] = (
                                state_id((), t),
                                rep,
                            )

    m = PushdownCoinAutomaton(
        state_count=prefix_count * n_inner,
        input_alphabet_size=2,
        stack_symbols=inner.stack_symbols,
        start=state_id((), inner.start),
        initial_stack=inner.initial_stack,
        transitions=transitions,
        finals={state_id((), s): label for s, label in inner.finals.items()},
        symbol_distribution=None,
        block_structure=BlockDrive(sim, inner),
    )
    check_pushdown(m)
    return m


def build_sqrt_pda() -> PushdownCoinAutomaton:
    """Machine whose label-1 probability is exactly sqrt(p).

    One raw bit decides: 1 halts immediately with label 1; 0 runs the
    composed symmetric ladder with g = (1-p)/2 and reports the complement
    of its label.  The identity p + (1-p)(1 - gamma(p)) = sqrt(p) does the
    rest.
    """
    one = RationalFunction.of((1,))
    g = RationalFunction.of((1, -1), (2,))
    dice = dice_rational_to_block([g, one - g - g, g])
    ladder = build_ladder_pda(g)
    composed = compose_with_block(dice, ladder)
    shift = 2  # wrapper states 0 (entry) and 1 (immediate label 1)
    transitions = {}
    x = 0
    transitions[(0, 1, x)] = (1, ())
    transitions[(0, 0, x)] = (composed.start + shift, (x,))
    for bit in (0, 1):
        transitions[(1, bit, x)] = (1, ())
    for (s, i, b), (t, rep) in composed.transitions.items():
        transitions[(s + shift, i, b)] = (t + shift, rep)
    finals = {1: 1}
    for s, label in composed.finals.items():
        finals[s + shift] = 1 - label
    m = PushdownCoinAutomaton(
        state_count=composed.state_count + shift,
        input_alphabet_size=2,
        stack_symbols=1,
        start=0,
        initial_stack=(x,),
        transitions=transitions,
        finals=finals,
        symbol_distribution=None,
        block_structure=BlockDrive(
            composed.block_structure.dice, ladder, wrapper="sqrt_complement"
        ),
    )
    check_pushdown(m)
    return m


@dataclass(frozen=True)
class BivariatePoly:
    """Integer polynomial in (value, p); terms maps (value_power, p_power)
    to coefficients."""

    terms: tuple[tuple[tuple[int, int], int], ...]

    @staticmethod
    def of(terms: dict) -> "BivariatePoly":
        items = tuple(sorted((k, int(v)) for k, v in terms.items() if v))
        return BivariatePoly(items)

    def eval(self, value: float, p: float) -> float:
        return float(
            sum(c * value**i * p**j for (i, j), c in self.terms)
        )


@dataclass
class AlgebraicCheck:
    residuals: list[float]
    max_residual: float
    tol: float
    passed: bool


def verify_algebraic(samples, relation: BivariatePoly, tol: float = 1e-9) -> AlgebraicCheck:
    """Check |relation(value, p)| <= tol at every (p, value) sample.

    This certifies numerically that the sampled values follow the claimed
    polynomial relation; it is a spot check, not a proof.
    """
    residuals = [abs(relation.eval(value, p)) for p, value in samples]
    worst = max(residuals) if residuals else 0.0
    return AlgebraicCheck(residuals, worst, tol, worst <= tol)
