"""Finite coin machines: validation, runs, and exact extraction."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coinfactory.automaton import (
    FiniteCoinAutomaton,
    builtin,
    extract_rational,
    relabel_complement,
    run,
    validate,
)
from coinfactory.bitsource import BitSource
from coinfactory.errors import NonHaltingState, StepCapExceeded, UnknownName
from coinfactory.ratfunc import RationalFunction


def absorbing(label_by_state):
    """Delta rows for final states: both tosses loop."""
    return {s: (s, s) for s in label_by_state}


class TestShape:
    def test_rejects_non_absorbing_final(self):
        a = FiniteCoinAutomaton(
            state_count=2, start=0, delta=((1, 1), (0, 0)), outputs={1: 1}
        )
        with pytest.raises(ValueError):
            validate(a)

    def test_rejects_out_of_range_successor(self):
        a = FiniteCoinAutomaton(
            state_count=1, start=0, delta=((0, 5),), outputs={}
        )
        with pytest.raises(ValueError):
            validate(a)

    def test_labels_property(self):
        assert builtin("von_neumann").labels == (0, 1)


class TestValidate:
    def test_prunes_unreachable_states(self):
        # state 3 is unreachable decoration
        a = FiniteCoinAutomaton(
            state_count=4,
            start=0,
            delta=((1, 2), (1, 1), (2, 2), (3, 3)),
            outputs={1: 0, 2: 1, 3: 1},
        )
        v = validate(a)
        assert v.state_count == 3
        assert sorted(v.outputs.items()) == [(1, 0), (2, 1)]

    def test_detects_trap_cycle(self):
        a = FiniteCoinAutomaton(
            state_count=3, start=0, delta=((1, 2), (2, 2), (1, 1)), outputs={}
        )
        with pytest.raises(NonHaltingState):
            validate(a)

    def test_keeps_halting_machine(self):
        v = validate(builtin("ratio"))
        assert v.state_count == 5


class TestRun:
    def test_deterministic_replay(self):
        a = builtin("von_neumann")
        first = run(a, BitSource(seed=5, bias=0.3, trial=9))
        second = run(a, BitSource(seed=5, bias=0.3, trial=9))
        assert first == second

    def test_step_cap(self):
        a = builtin("von_neumann")
        with pytest.raises(StepCapExceeded):
            run(a, BitSource(seed=0, bias=0.5, trial=0), step_cap=1)

    def test_square_consumes_two_bits(self):
        a = builtin("square")
        label, steps = run(a, BitSource(seed=1, bias=0.9, trial=0))
        assert steps == 2
        assert label in (0, 1)

    def test_empirical_rate_tracks_extraction(self):
        a = builtin("ratio")
        f = extract_rational(a)[1]
        p = 0.3
        hits = sum(
            run(a, BitSource(seed=11, bias=p, trial=t))[0] for t in range(4000)
        )
        expect = float(f.eval(Fraction(3, 10)))
        assert abs(hits / 4000 - expect) < 0.03


class TestExtraction:
    def test_von_neumann_is_half(self):
        fs = extract_rational(builtin("von_neumann"))
        assert fs[1] == RationalFunction.of((1,), (2,))

    def test_square_is_p_squared(self):
        fs = extract_rational(builtin("square"))
        assert fs[1] == RationalFunction.of((0, 0, 1))

    def test_ratio_matches_closed_form(self):
        fs = extract_rational(builtin("ratio"))
        assert fs[1] == RationalFunction.of((0, 0, 1), (1, -2, 2))

    def test_labels_sum_to_one(self):
        for name in ("von_neumann", "square", "ratio"):
            fs = extract_rational(builtin(name))
            total = fs[0]
            for f in fs[1:]:
                total = total + f
            assert total == RationalFunction.of((1,))

    def test_start_in_finals(self):
        a = FiniteCoinAutomaton(
            state_count=1, start=0, delta=((0, 0),), outputs={0: 1}
        )
        fs = extract_rational(a)
        assert fs[1] == RationalFunction.of((1,))
        assert fs[0] == RationalFunction.of((0,))

    def test_complement_swaps_functions(self):
        a = builtin("ratio")
        fs = extract_rational(a)
        gs = extract_rational(relabel_complement(a))
        assert gs[0] == fs[1]
        assert gs[1] == fs[0]

    def test_unknown_builtin(self):
        with pytest.raises(UnknownName):
            builtin("nonesuch")


@st.composite
def random_halting_machines(draw):
    """Machines whose interior states all step strictly toward a final."""
    n_interior = draw(st.integers(1, 4))
    n = n_interior + 2  # two finals at the end
    delta = []
    for s in range(n_interior):
        # force progress: successors lie strictly beyond s
        delta.append(
            (
                draw(st.integers(s + 1, n - 1)),
                draw(st.integers(s + 1, n - 1)),
            )
        )
    delta.append((n_interior, n_interior))
    delta.append((n_interior + 1, n_interior + 1))
    return FiniteCoinAutomaton(
        state_count=n,
        start=0,
        delta=tuple(delta),
        outputs={n_interior: 0, n_interior + 1: 1},
    )


class TestExtractionProperties:
    @given(random_halting_machines(), st.fractions(min_value=Fraction(1, 10),
                                                   max_value=Fraction(9, 10)))
    def test_extraction_matches_path_enumeration(self, a, p):
        """On acyclic machines the label-1 probability is a finite path sum."""
        fs = extract_rational(a)
        value = fs[1].eval(p) if len(fs) > 1 else Fraction(0)

        def mass(state):
            if a.outputs.get(state) == 1:
                return Fraction(1)
            if state in a.outputs:
                return Fraction(0)
            lo, hi = a.delta[state]
            return (1 - p) * mass(lo) + p * mass(hi)

        assert value == mass(a.start)

    @given(random_halting_machines())
    def test_probabilities_stay_in_unit_interval(self, a):
        for f in extract_rational(a):
            for j in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
                assert 0 <= f.eval(j) <= 1
