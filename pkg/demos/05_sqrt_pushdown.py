"""sqrt(p) needs a stack — and gets one.

No finite machine simulates sqrt(p): finite machines only produce
rational functions.  A machine with one stack can.  The route runs
through a random walk: let the three-faced die of the previous demo
(faces g, 1-2g, g with g = (1-p)/2) drive a walk that pops on face 0
and pushes on face 2.  Its probability gamma of ever popping the first
symbol satisfies 2g*gamma^2 - 2*gamma + 1 = 0, an algebraic equation,
and gamma = (1 - sqrt(p))/(1 - p).  One extra toss up front turns that
into sqrt(p) exactly: answer 1 on heads, otherwise answer the walk's
complement.

Values of stack machines come from a fixed point: the matrix G of
first-pop probabilities satisfies G = A + B G + C G^2.  The solver also
reports each row sum of G — exactly 1 when the walk is recurrent.  A
walk that drifts upward escapes with positive probability, its row sums
fall short of 1, and evaluation refuses rather than quietly renormalize.
"""

import math

from coinfactory import (
    BivariatePoly,
    NotAlmostSurelyHalting,
    build_ladder_pda,
    build_sqrt_pda,
    parse_rational,
    pda_value,
    pop_probabilities,
    simulate,
    verify_algebraic,
)


def main() -> None:
    ladder = build_ladder_pda(parse_rational("(1 - p)/2"))
    print("first-passage fixed point")
    print("-------------------------")
    for p in (0.25, 4 / 9, 0.5):
        gamma = pda_value(ladder, p)
        closed = (1 - math.sqrt(p)) / (1 - p)
        residual = 2 * (1 - p) / 2 * gamma**2 - 2 * gamma + 1
        print(f"p = {p:.4f}: gamma = {gamma:.9f}, closed form {closed:.9f}, "
              f"quadratic residual {residual:+.1e}")

    print()
    print("the sqrt(p) machine")
    print("-------------------")
    sqrt = build_sqrt_pda()
    print(f"states: {sqrt.state_count}, stack symbols: {sqrt.stack_symbols}")
    samples = []
    for tenths in range(1, 10):
        p = tenths / 10
        value = pda_value(sqrt, p)
        samples.append((p, value))
        print(f"p = {p:.1f}: value {value:.9f}  sqrt(p) {math.sqrt(p):.9f}")

    relation = BivariatePoly.of({(2, 0): 1, (0, 1): -1})  # f^2 - p
    check = verify_algebraic(samples, relation)
    print(f"algebraic relation f^2 = p holds at all nine biases: "
          f"{check.passed} (worst residual {check.max_residual:.1e})")

    print()
    print("a transient walk is refused")
    print("---------------------------")
    drifting = build_ladder_pda(
        parse_rational("3/8"), down=parse_rational("1/4")
    )
    goodness = float(pop_probabilities(drifting, 0.5).goodness().min())
    print(f"up 3/8, down 1/4: pop probability sums to {goodness:.6f} < 1")
    try:
        pda_value(drifting, 0.5)
    except NotAlmostSurelyHalting as exc:
        print(f"evaluation refuses: {exc}")

    print()
    print("seeded run of the sqrt machine at p = 0.64 (100000 trials)")
    print("----------------------------------------------------------")
    report = simulate(sqrt, 0.64, n_trials=100_000, seed=42)
    print(f"estimate {report.estimate:.5f}  target {report.target:.5f}  "
          f"z {report.z_score:+.2f}  truncated {report.did_not_halt}")


if __name__ == "__main__":
    main()
