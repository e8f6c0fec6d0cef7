"""Many-sided outputs, and feeding them to another machine.

A block procedure with several outputs turns the coin into a loaded die
whose face probabilities are exact rational functions of p.  Stacking
two binary stages does the work here: the first stage decides "is it
face 0?", the second splits the remainder, and a word counts only if
both stages reach a verdict.  The resulting die can then drive any
machine that reads letters — the machine never sees raw tosses, only
die rolls, and the exactness composes.
"""

from fractions import Fraction

from coinfactory import (
    RationalFunction,
    build_ladder_pda,
    compose_with_block,
    dice_rational_to_block,
    format_rational,
    letter_measures_at,
    parse_rational,
    pda_value,
    simulate,
)

BIAS = 0.49


def main() -> None:
    g = parse_rational("(1 - p)/2")
    one = RationalFunction.of((1,))
    targets = [g, one - g - g, g]
    sim = dice_rational_to_block(targets)
    print("a three-faced die from a coin")
    print("-----------------------------")
    print(f"targets: ({', '.join(format_rational(t) for t in targets)})")
    print(f"outputs = {sim.outputs}, block length = {sim.block_length}")
    stage, node = 0, sim
    while node is not None:
        print(f"stage {stage}: k = {node.head.k}, r = {node.head.r}")
        node, stage = node.tail, stage + 1

    print()
    print("exact face distributions")
    print("------------------------")
    for face, f in enumerate(sim.distributions_univariate()):
        print(f"face {face}: {format_rational(f)}")

    exact_p = Fraction(BIAS)
    masses, discard = letter_measures_at(sim, (1 - exact_p, exact_p))
    print(f"at p = {BIAS}: faces "
          f"{[float(m / (1 - discard)) for m in masses]}, "
          f"block kept with probability {float(1 - discard):.4f}")

    print()
    print("the die drives a stack walk")
    print("---------------------------")
    ladder = build_ladder_pda(g)
    composed = compose_with_block(sim, ladder)
    print(f"walk states {ladder.state_count}, composed machine reads raw "
          f"tosses with {composed.state_count} states")
    value = pda_value(composed, BIAS)
    gamma = (1 - BIAS ** 0.5) / (1 - BIAS)
    print(f"first-passage value at p = {BIAS}: {value:.10f}")
    print(f"closed form (1 - sqrt(p))/(1 - p): {gamma:.10f}")

    report = simulate(composed, BIAS, n_trials=100_000, seed=3)
    print(f"seeded run: estimate {report.estimate:.5f}  "
          f"z {report.z_score:+.2f}  "
          f"truncated trials {report.did_not_halt}")


if __name__ == "__main__":
    main()
