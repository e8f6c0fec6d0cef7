"""Exact simulation of f(p)-coins from independent tosses of a p-coin.

The bias p is unknown to every machine here.  Rational targets run on
finite automata and fixed-length block procedures with exact symbolic
extraction of what they simulate; algebraic targets such as sqrt(p) run
on stack machines whose values come from the pop-probability fixed
point.  A seeded Monte Carlo harness and a JSON machine format round out
the toolbox; the `coinfactory` command exposes all of it.
"""

from .automaton import (
    FiniteCoinAutomaton,
    builtin,
    extract_rational,
    relabel_complement,
    run,
    validate,
)
from .bitsource import BitSource
from .blocks import (
    BlockSimulation,
    brute_force_distribution,
    classify_block,
    exact_distribution,
    keep_probability,
    rational_to_block,
    run_block,
)
from .dice import (
    DiceBlockSimulation,
    DiceStage,
    dice_rational_to_block,
    letter_measures_at,
)
from .errors import (
    AlphabetMismatch,
    CapExceeded,
    CoinFactoryError,
    DidNotHalt,
    DivisionByZero,
    DocumentError,
    ExpressionError,
    InvalidRange,
    IterCapExceeded,
    LengthMismatch,
    NonHaltingState,
    NotAlmostSurelyHalting,
    NotAProbabilityVector,
    PoleAtPoint,
    StepCapExceeded,
    UndefinedFinal,
    UnknownName,
)
from .expr import parse_multirational, parse_rational
from .machinefile import (
    document_to_machine,
    dumps,
    load,
    loads,
    machine_to_document,
    save,
)
from .montecarlo import (
    MonteCarloReport,
    simulate,
    simulate_block,
    simulate_dice,
    simulate_finite,
    simulate_pushdown,
)
from .multivar import MultiRational
from .pushdown import (
    AlgebraicCheck,
    BivariatePoly,
    PushdownCoinAutomaton,
    build_ladder_pda,
    build_sqrt_pda,
    compose_with_block,
    pda_run,
    pda_value,
    pop_probabilities,
    verify_algebraic,
)
from .ratfunc import (
    BernsteinPair,
    IntPolynomial,
    RationalFunction,
    bernstein_from_rational,
    check_range,
    format_poly,
    format_rational,
    polya_exponent,
)

__all__ = [
    "AlgebraicCheck",
    "AlphabetMismatch",
    "BernsteinPair",
    "BitSource",
    "BivariatePoly",
    "BlockSimulation",
    "CapExceeded",
    "CoinFactoryError",
    "DiceBlockSimulation",
    "DiceStage",
    "DidNotHalt",
    "DivisionByZero",
    "DocumentError",
    "ExpressionError",
    "FiniteCoinAutomaton",
    "IntPolynomial",
    "InvalidRange",
    "IterCapExceeded",
    "LengthMismatch",
    "MonteCarloReport",
    "MultiRational",
    "NonHaltingState",
    "NotAProbabilityVector",
    "NotAlmostSurelyHalting",
    "PoleAtPoint",
    "PushdownCoinAutomaton",
    "RationalFunction",
    "StepCapExceeded",
    "UndefinedFinal",
    "UnknownName",
    "bernstein_from_rational",
    "brute_force_distribution",
    "builtin",
    "build_ladder_pda",
    "build_sqrt_pda",
    "check_range",
    "classify_block",
    "compose_with_block",
    "dice_rational_to_block",
    "document_to_machine",
    "dumps",
    "exact_distribution",
    "extract_rational",
    "format_poly",
    "format_rational",
    "keep_probability",
    "letter_measures_at",
    "load",
    "loads",
    "machine_to_document",
    "parse_multirational",
    "parse_rational",
    "pda_run",
    "pda_value",
    "polya_exponent",
    "pop_probabilities",
    "rational_to_block",
    "relabel_complement",
    "run",
    "run_block",
    "save",
    "simulate",
    "simulate_block",
    "simulate_dice",
    "simulate_finite",
    "simulate_pushdown",
    "validate",
    "verify_algebraic",
]
