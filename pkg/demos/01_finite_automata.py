"""Finite machines: turn a coin of unknown bias p into an f(p)-coin.

The oldest example is von Neumann's trick: toss twice, answer 1 on
"10", answer 0 on "01", and start over on "00" or "11".  Whatever p is,
both answers have probability p(1-p), so the output is a fair coin.
The same idea — walk a finite transition table until an output state is
reached — also produces p^2 and p^2/(2p^2 - 2p + 1), and for every such
machine the exact output distribution is a rational function of p that
can be computed symbolically, not just estimated.
"""

from fractions import Fraction

from coinfactory import (
    BitSource,
    builtin,
    extract_rational,
    format_rational,
    loads,
    dumps,
    run,
    simulate,
)

BIAS = 0.3


def main() -> None:
    print("exact extraction")
    print("----------------")
    for name in ("von_neumann", "square", "ratio"):
        machine = builtin(name)
        functions = extract_rational(machine)
        value = functions[1].eval(Fraction(BIAS))
        print(f"{name:12s} P[output=1] = {format_rational(functions[1])}"
              f"   at p={BIAS}: {float(value):.6f}")

    print()
    print("a few scalar runs of the fair coin (seed 1, p=0.3)")
    print("--------------------------------------------------")
    machine = builtin("von_neumann")
    for trial in range(5):
        label, bits = run(machine, BitSource(seed=1, bias=BIAS, trial=trial))
        print(f"trial {trial}: output {label} after {bits} tosses")

    print()
    print("seeded statistical check (100000 trials)")
    print("----------------------------------------")
    for name in ("von_neumann", "square", "ratio"):
        report = simulate(builtin(name), BIAS, n_trials=100_000, seed=2024)
        print(f"{name:12s} estimate {report.estimate:.5f}"
              f"  target {report.target:.5f}"
              f"  z {report.z_score:+.2f}"
              f"  mean tosses {report.mean_bits_consumed:.2f}")

    print()
    print("machines are plain JSON documents")
    print("---------------------------------")
    text = dumps(machine)
    print(f"the fair-coin machine serializes to {len(text)} bytes "
          f"and reloads identically: {loads(text) == machine}")


if __name__ == "__main__":
    main()
