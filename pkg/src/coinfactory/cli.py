"""Command-line surface tying the simulators together.

Commands build machines from target expressions, save and load them as
JSON documents, extract exact distributions, evaluate stack machines, and
run seeded Monte Carlo checks.  Every command maps failures to a stable
exit code: 2 for range violations, 3 for exhausted search or iteration
caps, 4 for unparseable input (expressions or documents), 5 for machines
that cannot halt almost surely, and 1 for a clean verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import machinefile
from .automaton import FiniteCoinAutomaton, builtin, extract_rational
from .blocks import BlockSimulation, exact_distribution, rational_to_block
from .dice import DiceBlockSimulation, dice_rational_to_block
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
from .montecarlo import simulate
from .multivar import format_multirational
from .pushdown import (
    HALT_TOL,
    PushdownCoinAutomaton,
    build_ladder_pda,
    build_sqrt_pda,
    pop_probabilities,
)
from .ratfunc import (
    RationalFunction,
    bernstein_from_rational,
    format_rational,
)

_EXIT_CODES = (
    (2, (InvalidRange, PoleAtPoint, NotAProbabilityVector)),
    (3, (CapExceeded, IterCapExceeded, StepCapExceeded)),
    (4, (ExpressionError, DocumentError, DivisionByZero, UnknownName,
         LengthMismatch, AlphabetMismatch)),
    (5, (NonHaltingState, NotAlmostSurelyHalting, DidNotHalt, UndefinedFinal)),
)


def _check_open_unit(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise InvalidRange(f"bias must lie strictly between 0 and 1, got {p}")
    return p


def _write_or_print(machine, out: str | None) -> None:
    if out is None:
        sys.stdout.write(machinefile.dumps(machine))
    else:
        machinefile.save(machine, out)
        print(f"wrote {out}")


def cmd_build_block(args) -> int:
    f = parse_rational(args.f)
    bp = bernstein_from_rational(f, cap=args.cap)
    sim = rational_to_block(f, cap=args.cap)
    print(f"k = {sim.k}")
    print(f"r = {sim.r}")
    print(f"polya_exponent = {bp.polya_exponent}")
    print(f"block_length = {sim.block_length}")
    if args.out is not None:
        machinefile.save(sim, args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_dice_build(args) -> int:
    targets = [parse_multirational(text, args.s) for text in args.f]
    sim = dice_rational_to_block(targets, cap=args.cap, s=args.s)
    print(f"s = {sim.s}")
    print(f"outputs = {sim.outputs}")
    print(f"block_length = {sim.block_length}")
    node = sim
    stage = 0
    while node is not None:
        print(f"stage {stage}: k = {node.head.k}, r = {node.head.r}")
        node = node.tail
        stage += 1
    if args.out is not None:
        machinefile.save(sim, args.out)
        print(f"wrote {args.out}")
    return 0


def _half_minus_half_p() -> RationalFunction:
    return RationalFunction.of((1, -1), (2,))


def _builtin_machine(name: str):
    if name in ("von_neumann", "square", "ratio"):
        return builtin(name)
    g = _half_minus_half_p()
    if name == "ladder":
        return build_ladder_pda(g)
    if name == "transient_ladder":
        return build_ladder_pda(
            RationalFunction.of((3,), (8,)), down=RationalFunction.of((1,), (4,))
        )
    if name == "sqrt":
        return build_sqrt_pda()
    if name == "sqrt_dice":
        one = RationalFunction.of((1,))
        return dice_rational_to_block([g, one - g - g, g])
    raise UnknownName(f"unknown builtin machine {name!r}")


BUILTIN_MACHINES = (
    "von_neumann", "square", "ratio", "ladder", "transient_ladder",
    "sqrt", "sqrt_dice",
)


def cmd_builtin(args) -> int:
    _write_or_print(_builtin_machine(args.name), args.out)
    return 0


def _label_functions(machine) -> dict[int, str]:
    """Label -> printable exact distribution, for machines that have one."""
    if isinstance(machine, FiniteCoinAutomaton):
        functions = extract_rational(machine)
        return {
            label: format_rational(f) for label, f in enumerate(functions)
        }
    if isinstance(machine, BlockSimulation):
        f = exact_distribution(machine)
        one = RationalFunction.of((1,))
        return {0: format_rational(one - f), 1: format_rational(f)}
    if isinstance(machine, DiceBlockSimulation):
        if machine.s == 2:
            return {
                label: format_rational(f)
                for label, f in enumerate(machine.distributions_univariate())
            }
        return {
            label: format_multirational(f)
            for label, f in enumerate(machine.distributions())
        }
    raise DocumentError(
        "pushdown machines have no rational extraction; use pda-value"
    )


def cmd_extract(args) -> int:
    machine = machinefile.load(args.machine)
    for label, text in sorted(_label_functions(machine).items()):
        print(f"label {label}: {text}")
    return 0


def cmd_verify_exact(args) -> int:
    machine = machinefile.load(args.machine)
    if isinstance(machine, FiniteCoinAutomaton):
        if len(args.f) != 1:
            raise ExpressionError("finite machines take exactly one --f", 0)
        functions = extract_rational(machine)
        got = functions[1] if len(functions) > 1 else RationalFunction.of((0,))
        pairs = [(1, got, parse_rational(args.f[0]))]
        render = format_rational
    elif isinstance(machine, BlockSimulation):
        if len(args.f) != 1:
            raise ExpressionError("block machines take exactly one --f", 0)
        pairs = [(1, exact_distribution(machine), parse_rational(args.f[0]))]
        render = format_rational
    elif isinstance(machine, DiceBlockSimulation):
        if len(args.f) != machine.outputs:
            raise ExpressionError(
                f"dice machines take one --f per output ({machine.outputs})", 0
            )
        want_all = [parse_multirational(text, machine.s) for text in args.f]
        pairs = [
            (label, got, want)
            for label, (got, want) in enumerate(zip(machine.distributions(), want_all))
        ]
        if machine.s == 2:
            render = lambda f: format_rational(f.to_univariate())
        else:
            render = format_multirational
    else:
        raise DocumentError(
            "pushdown machines are not rational; use pda-value and "
            "statistical checks"
        )
    ok = True
    for label, got, want in pairs:
        if _agrees(got, want):
            print(f"label {label}: match: {render(got)}")
        else:
            ok = False
            print(f"label {label}: MISMATCH")
            print(f"  machine: {render(got)}")
            print(f"  target:  {render(want)}")
    return 0 if ok else 1


def _agrees(got, want) -> bool:
    if isinstance(got, RationalFunction):
        return got == want
    return got.equals_on_simplex(want)


def cmd_simulate(args) -> int:
    machine = machinefile.load(args.machine)
    _check_open_unit(args.p)
    if args.n < 1:
        raise InvalidRange("need at least one trial")
    target = None
    if args.target is not None:
        target = float(parse_rational(args.target).eval(Fraction(args.p)))
    report = simulate(
        machine, args.p, n_trials=args.n, seed=args.seed,
        step_cap=args.step_cap, target=target,
    )
    if args.json:
        sys.stdout.write(report.to_json())
        return 0
    doc = json.loads(report.to_json())
    for key in (
        "kind", "p", "n_trials", "seed", "successes", "did_not_halt",
        "estimate", "target", "standard_error", "z_score",
        "mean_bits_consumed", "label_counts",
    ):
        print(f"{key} = {doc[key]}")
    return 0


def cmd_pda_value(args) -> int:
    machine = machinefile.load(args.machine)
    if not isinstance(machine, PushdownCoinAutomaton):
        raise DocumentError("pda-value needs a pushdown machine document")
    _check_open_unit(args.p)
    solution = pop_probabilities(
        machine, args.p, tol=args.tol, iter_cap=args.iter_cap
    )
    worst, (symbol, state) = solution.min_goodness()
    if worst < 1.0 - HALT_TOL:
        raise NotAlmostSurelyHalting(symbol, state, worst)
    transfer = solution.word_transfer(machine.initial_stack)
    value = sum(
        float(transfer[machine.start, state])
        for state, label in machine.finals.items()
        if label == 1
    )
    print(f"value = {value!r}")
    print(f"iterations = {solution.iterations}")
    print(f"method = {solution.method}")
    print(f"residual = {solution.residual:.3e}")
    print(f"min_goodness = {worst!r} at (symbol {symbol}, state {state})")
    return 0


def cmd_polya(args) -> int:
    f = parse_rational(args.f)
    bp = bernstein_from_rational(f, cap=args.cap)
    print(f"polya_exponent = {bp.polya_exponent}")
    print(f"degree = {bp.degree}")
    print(f"d = {list(bp.d)}")
    print(f"e = {list(bp.e)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coinfactory",
        description="Exact simulation of f(p)-coins from p-coins.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bb = sub.add_parser(
        "build-block", help="certify a rational target and build its block procedure"
    )
    bb.add_argument("--f", required=True, help="target expression in p")
    bb.add_argument("--cap", type=int, default=200, help="positivization cap")
    bb.add_argument("--out", help="write the machine document here")
    bb.set_defaults(func=cmd_build_block)

    db = sub.add_parser(
        "dice-build", help="build a many-output block procedure (repeat --f per output)"
    )
    db.add_argument("--f", action="append", required=True,
                    help="one target expression per output, in p1..ps")
    db.add_argument("--s", type=int, default=2, help="alphabet size")
    db.add_argument("--cap", type=int, default=200, help="positivization cap")
    db.add_argument("--out", help="write the machine document here")
    db.set_defaults(func=cmd_dice_build)

    bi = sub.add_parser("builtin", help="emit a named reference machine")
    bi.add_argument("--name", required=True, choices=BUILTIN_MACHINES)
    bi.add_argument("--out", help="write here instead of stdout")
    bi.set_defaults(func=cmd_builtin)

    ex = sub.add_parser(
        "extract", help="print the exact label distributions of a machine file"
    )
    ex.add_argument("--machine", required=True, help="machine document path")
    ex.set_defaults(func=cmd_extract)

    ve = sub.add_parser(
        "verify-exact", help="compare a machine's exact distribution against --f"
    )
    ve.add_argument("--machine", required=True, help="machine document path")
    ve.add_argument("--f", action="append", required=True,
                    help="expected target; repeat per output for dice machines")
    ve.set_defaults(func=cmd_verify_exact)

    si = sub.add_parser("simulate", help="seeded Monte Carlo run of a machine file")
    si.add_argument("--machine", required=True, help="machine document path")
    si.add_argument("--p", type=float, required=True, help="coin bias")
    si.add_argument("--n", type=int, default=10**6, help="number of trials")
    si.add_argument("--seed", type=int, default=0, help="generator seed")
    si.add_argument("--step-cap", type=int, default=10**6,
                    help="per-trial input budget")
    si.add_argument("--target", help="exact value to test against (expression in p)")
    si.add_argument("--json", action="store_true",
                    help="emit the machine-readable report")
    si.set_defaults(func=cmd_simulate)

    pv = sub.add_parser(
        "pda-value", help="halting-with-label-1 probability of a stack machine"
    )
    pv.add_argument("--machine", required=True, help="machine document path")
    pv.add_argument("--p", type=float, required=True, help="coin bias")
    pv.add_argument("--tol", type=float, default=1e-12, help="solver tolerance")
    pv.add_argument("--iter-cap", type=int, default=10**6,
                    help="solver iteration budget")
    pv.set_defaults(func=cmd_pda_value)

    po = sub.add_parser(
        "polya", help="positivization exponent and threshold vectors for a target"
    )
    po.add_argument("--f", required=True, help="target expression in p")
    po.add_argument("--cap", type=int, default=200, help="positivization cap")
    po.set_defaults(func=cmd_polya)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CoinFactoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for code, kinds in _EXIT_CODES:
            if isinstance(exc, kinds):
                return code
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
