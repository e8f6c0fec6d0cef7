"""Seeded statistical verification for every machine kind.

Each trial owns a counter-based random stream derived from (seed, trial),
so runs are reproducible bit for bit and trials can be batched in numpy
without changing a single draw.  The vectorized generator here mirrors
BitSource exactly: the k-th uniform of a trial is the same number either
way, which the tests pin down by replaying scalar runs.

Finite machines are stepped in bulk, all live trials at once.  Block and
dice procedures are sampled at block granularity: the number of discarded
blocks is geometric and the kept block's letter is categorical, both with
exact probabilities, so no bit of the block ever needs materializing.
Stack machines built from blocks do the same per emitted letter, folding
the discard count and the letter into one uniform; boundary-recurrent
walks have infinite expected runtime, so a step budget is mandatory and
truncated trials are reported, not hidden.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .automaton import FiniteCoinAutomaton, extract_rational, validate
from .bitsource import BitSource, GOLDEN, MASK64, mix64
from .blocks import BlockSimulation, exact_distribution, keep_probability
from .dice import DiceBlockSimulation, letter_measures_at
from .errors import DidNotHalt, UndefinedFinal
from .pushdown import PushdownCoinAutomaton, pda_run, pda_value

_GOLD = np.uint64(GOLDEN)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_U53 = 2.0**-53

DEFAULT_TRIALS = 10**6
DEFAULT_SIM_CAP = 10**6


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def stream_states(seed: int, trials: np.ndarray) -> np.ndarray:
    """Vector twin of bitsource.stream_state over an array of trial ids."""
    base = np.uint64(mix64(seed & MASK64))
    return _mix64_vec(base ^ (trials.astype(np.uint64) * _GOLD))


def _draw(states: np.ndarray, k: int) -> np.ndarray:
    """k-th uniform (1-based) of each stream; matches BitSource.uniform."""
    z = states + np.uint64((k * GOLDEN) & MASK64)
    return (_mix64_vec(z) >> np.uint64(11)).astype(np.float64) * _U53


@dataclass
class MonteCarloReport:
    """One experiment: counts, the exact target, and the z-score of the
    observed frequency against it.

    Trials that exhaust their budget are excluded from the estimate and
    reported under did_not_halt, so a heavy-tailed runtime inflates the
    truncation rate instead of silently dragging the estimate toward
    zero.  mean_bits_consumed averages over every trial, truncated ones
    at the budget."""

    kind: str
    n_trials: int
    seed: int
    p: float
    target: float | None
    successes: int
    did_not_halt: int
    estimate: float
    standard_error: float
    z_score: float | None
    mean_bits_consumed: float
    label_counts: dict

    def to_json(self) -> str:
        payload = asdict(self)
        payload["label_counts"] = {
            str(k): int(v) for k, v in sorted(self.label_counts.items())
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def _finish(kind, n_trials, seed, p, target, label_counts, did_not_halt, mean_bits):
    effective = n_trials - did_not_halt
    successes = int(label_counts.get(1, 0))
    estimate = successes / effective if effective else float("nan")
    spread = estimate * (1.0 - estimate) if effective else 0.0
    standard_error = math.sqrt(spread / effective) if effective else 0.0
    if target is None:
        z_score = None
    elif standard_error > 0.0:
        z_score = (estimate - target) / standard_error
    else:
        z_score = 0.0 if estimate == target else float("inf")
    return MonteCarloReport(
        kind=kind,
        n_trials=n_trials,
        seed=seed,
        p=float(p),
        target=None if target is None else float(target),
        successes=successes,
        did_not_halt=did_not_halt,
        estimate=estimate,
        standard_error=standard_error,
        z_score=z_score,
        mean_bits_consumed=float(mean_bits),
        label_counts={int(k): int(v) for k, v in sorted(label_counts.items())},
    )


def _tally(labels: np.ndarray) -> dict:
    values, counts = np.unique(labels[labels >= 0], return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def simulate_finite(
    a: FiniteCoinAutomaton,
    p: float,
    n_trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    step_cap: int = DEFAULT_SIM_CAP,
    target: float | None = None,
) -> MonteCarloReport:
    """Run every trial of a finite machine in lockstep.

    Bit-for-bit equivalent to run() with BitSource(seed, p, trial): step k
    of every live trial consumes that trial's k-th uniform.
    """
    a = validate(a)
    if target is None:
        functions = extract_rational(a)
        target = (
            float(functions[1].eval(Fraction(p))) if len(functions) > 1 else 0.0
        )
    delta = np.array(a.delta, dtype=np.int64)
    labels = np.full(a.state_count, -1, dtype=np.int64)
    for state, label in a.outputs.items():
        labels[state] = label
    states0 = stream_states(seed, np.arange(n_trials))
    state = np.full(n_trials, a.start, dtype=np.int64)
    out_labels = np.full(n_trials, -1, dtype=np.int64)
    out_bits = np.full(n_trials, step_cap, dtype=np.int64)
    alive = np.arange(n_trials)
    k = 0
    while alive.size and k < step_cap:
        k += 1
        bits = (_draw(states0[alive], k) < p).astype(np.int64)
        state[alive] = delta[state[alive], bits]
        done = labels[state[alive]] >= 0
        finished = alive[done]
        out_labels[finished] = labels[state[finished]]
        out_bits[finished] = k
        alive = alive[~done]
    return _finish(
        "finite", n_trials, seed, p, target, _tally(out_labels),
        int(alive.size), float(out_bits.mean()),
    )


def _geometric_split(u: np.ndarray, keep: float):
    """Split one uniform into (discard count, residual uniform).

    The discard count is geometric with success probability keep; the
    residual is uniform on (0, 1] and independent, carved out of the same
    draw.  Exact up to floating-point rounding of the thresholds.
    """
    if keep >= 1.0:
        return np.zeros(u.shape, dtype=np.int64), 1.0 - u
    tail = 1.0 - u  # in (0, 1]: uniforms carry 53 bits, never 1.0
    miss = 1.0 - keep
    discards = np.floor(np.log(tail) / math.log(miss)).astype(np.int64)
    residual = tail / np.power(miss, discards.astype(np.float64))
    return discards, (residual - miss) / keep


def simulate_block(
    sim: BlockSimulation,
    p: float,
    n_trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    target: float | None = None,
) -> MonteCarloReport:
    """Sample a block procedure exactly, at block granularity.

    Uniform one fixes how many blocks are discarded; uniform two decides
    the kept block's label with the exact conditional probability.
    """
    exact_p = Fraction(p)
    keep = float(keep_probability(sim, exact_p))
    ratio = float(exact_distribution(sim).eval(exact_p))
    if target is None:
        target = ratio
    states0 = stream_states(seed, np.arange(n_trials))
    discards, _ = _geometric_split(_draw(states0, 1), keep)
    ones = _draw(states0, 2) < ratio
    n_ones = int(ones.sum())
    bits = (discards + 1) * sim.block_length
    return _finish(
        "block", n_trials, seed, p, target,
        {0: n_trials - n_ones, 1: n_ones}, 0, float(bits.mean()),
    )


def simulate_dice(
    sim: DiceBlockSimulation,
    p: float,
    n_trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    target: float | None = None,
) -> MonteCarloReport:
    """Same discipline as simulate_block, with a categorical kept letter."""
    exact_p = Fraction(p)
    masses, discard_mass = letter_measures_at(sim, (1 - exact_p, exact_p))
    keep_mass = 1 - discard_mass
    conditional = [float(mass / keep_mass) for mass in masses]
    if target is None:
        target = conditional[1] if len(conditional) > 1 else 0.0
    edges = np.cumsum(conditional[:-1])
    states0 = stream_states(seed, np.arange(n_trials))
    discards, _ = _geometric_split(_draw(states0, 1), float(keep_mass))
    letters = np.searchsorted(edges, _draw(states0, 2), side="right")
    bits = (discards + 1) * sim.block_length
    values, tallies = np.unique(letters, return_counts=True)
    counts = {int(v): int(c) for v, c in zip(values, tallies)}
    return _finish(
        "dice", n_trials, seed, p, target, counts, 0, float(bits.mean())
    )


def _letter_tables(m: PushdownCoinAutomaton):
    """Per (state, letter): target state and stack growth; valid for
    machines with a single stack symbol."""
    next_state = np.zeros((m.state_count, m.input_alphabet_size), dtype=np.int64)
    growth = np.zeros_like(next_state)
    for (s, i, _b), (t, rep) in m.transitions.items():
        next_state[s, i] = t
        growth[s, i] = len(rep) - 1
    labels = np.full(m.state_count, -1, dtype=np.int64)
    for state, label in m.finals.items():
        labels[state] = label
    return next_state, growth, labels


def simulate_pushdown(
    m: PushdownCoinAutomaton,
    p: float,
    n_trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    step_cap: int = DEFAULT_SIM_CAP,
    target: float | None = None,
) -> MonteCarloReport:
    """Sample a stack machine with a per-trial input budget.

    Machines that record their block structure advance one emitted letter
    at a time: a single uniform yields both the geometric count of
    discarded blocks and the kept letter, and the inner machine's control
    state and stack height absorb the letter.  Bare one-symbol machines
    are stepped letterwise with the same draws pda_run would make; other
    machines fall back to scalar runs.  Trials exceeding the budget count
    as did_not_halt and are excluded from the estimate; boundary-recurrent
    walks make some truncation unavoidable, and with the default budget
    the induced exclusion bias for the built-ins sits far below the
    four-standard-error acceptance band.
    """
    if target is None:
        target = pda_value(m, p)
    drive = m.block_structure
    if drive is not None and drive.inner.stack_symbols == 1:
        return _simulate_block_driven(m, p, n_trials, seed, step_cap, target)
    if m.stack_symbols == 1:
        return _simulate_letterwise(m, p, n_trials, seed, step_cap, target)
    return _simulate_scalar(m, p, n_trials, seed, step_cap, target)


def _simulate_letterwise(m, p, n_trials, seed, step_cap, target):
    next_state, growth, labels = _letter_tables(m)
    edges = np.cumsum(m.letter_probabilities(p)[:-1])
    states0 = stream_states(seed, np.arange(n_trials))
    state = np.full(n_trials, m.start, dtype=np.int64)
    height = np.full(n_trials, len(m.initial_stack), dtype=np.int64)
    out_labels = np.full(n_trials, -1, dtype=np.int64)
    out_bits = np.full(n_trials, step_cap, dtype=np.int64)
    alive = np.arange(n_trials)
    k = 0
    while alive.size and k < step_cap:
        k += 1
        letters = np.searchsorted(edges, _draw(states0[alive], k), side="right")
        old = state[alive]
        state[alive] = next_state[old, letters]
        height[alive] += growth[old, letters]
        done = height[alive] == 0
        finished = alive[done]
        out_labels[finished] = labels[state[finished]]
        out_bits[finished] = k
        alive = alive[~done]
    halted_undefined = (out_bits < step_cap) & (out_labels < 0)
    if np.any(halted_undefined):
        raise UndefinedFinal(int(state[np.argmax(halted_undefined)]))
    return _finish(
        "pushdown", n_trials, seed, p, target, _tally(out_labels),
        int(alive.size), float(out_bits.mean()),
    )


def _simulate_block_driven(m, p, n_trials, seed, step_cap, target):
    drive = m.block_structure
    sim, inner = drive.dice, drive.inner
    exact_p = Fraction(p)
    masses, discard_mass = letter_measures_at(sim, (1 - exact_p, exact_p))
    keep = float(1 - discard_mass)
    edges = np.cumsum([float(mass / (1 - discard_mass)) for mass in masses][:-1])
    next_state, growth, labels = _letter_tables(inner)
    block = sim.block_length
    complement = drive.wrapper == "sqrt_complement"
    states0 = stream_states(seed, np.arange(n_trials))
    out_labels = np.full(n_trials, -1, dtype=np.int64)
    out_bits = np.full(n_trials, step_cap, dtype=np.int64)
    bits = np.zeros(n_trials, dtype=np.int64)
    k = 0
    if complement:
        k = 1
        shortcut = _draw(states0, 1) < p
        out_labels[shortcut] = 1
        out_bits[shortcut] = 1
        bits += 1
        alive = np.nonzero(~shortcut)[0]
    else:
        alive = np.arange(n_trials)
    state = np.full(n_trials, inner.start, dtype=np.int64)
    height = np.full(n_trials, len(inner.initial_stack), dtype=np.int64)
    while alive.size:
        k += 1
        discards, residual = _geometric_split(_draw(states0[alive], k), keep)
        letters = np.searchsorted(edges, residual, side="right")
        bits[alive] += (discards + 1) * block
        old = state[alive]
        state[alive] = next_state[old, letters]
        height[alive] += growth[old, letters]
        halted = height[alive] == 0
        over = bits[alive] > step_cap
        finished = alive[halted & ~over]
        inner_labels = labels[state[finished]]
        out_labels[finished] = (1 - inner_labels) if complement else inner_labels
        out_bits[finished] = bits[finished]
        alive = alive[~(halted | over)]
    return _finish(
        "pushdown", n_trials, seed, p, target, _tally(out_labels),
        int(n_trials - (out_labels >= 0).sum()), float(out_bits.mean()),
    )


def _simulate_scalar(m, p, n_trials, seed, step_cap, target):
    counts: dict[int, int] = {}
    did_not_halt = 0
    total_bits = 0
    for trial in range(n_trials):
        src = BitSource(seed=seed, bias=p, trial=trial)
        try:
            label, steps = pda_run(m, src, step_cap=step_cap)
        except DidNotHalt:
            did_not_halt += 1
            total_bits += step_cap
            continue
        counts[label] = counts.get(label, 0) + 1
        total_bits += steps
    return _finish(
        "pushdown", n_trials, seed, p, target, counts, did_not_halt,
        total_bits / n_trials,
    )


def simulate(
    machine,
    p: float,
    n_trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    step_cap: int = DEFAULT_SIM_CAP,
    target: float | None = None,
) -> MonteCarloReport:
    """Dispatch on the machine kind; see the per-kind functions."""
    if isinstance(machine, FiniteCoinAutomaton):
        return simulate_finite(machine, p, n_trials, seed, step_cap, target)
    if isinstance(machine, BlockSimulation):
        return simulate_block(machine, p, n_trials, seed, target)
    if isinstance(machine, DiceBlockSimulation):
        return simulate_dice(machine, p, n_trials, seed, target)
    if isinstance(machine, PushdownCoinAutomaton):
        return simulate_pushdown(machine, p, n_trials, seed, step_cap, target)
    raise TypeError(f"cannot simulate {type(machine).__name__}")
