"""Block procedures: read fixed-length words, keep or discard whole.

Once a target f = D/E has nonnegative thresholds d <= e, simulation is
mechanical.  Read k + 2r tosses: the first k bits address the target's
degree, the 2r padding bits are von Neumann pairs that keep the word
usable whatever p is.  Among words of the same composition, the first
d[i] (in a fixed squashed-lexicographic order) answer 1, the next
e[i] - d[i] answer 0, the rest are discarded and the block repeats.
Every kept word of weight i has probability p^i (1-p)^(k-i) times a
constant, so the answer frequency is exactly D/E — and because the
procedure is finite, that claim can be checked by enumerating every
word of the block.
"""

from fractions import Fraction
from itertools import product

from coinfactory import (
    brute_force_distribution,
    classify_block,
    exact_distribution,
    keep_probability,
    parse_rational,
    rational_to_block,
    simulate,
)

TARGET = "1/3"
BIAS = 0.7


def main() -> None:
    f = parse_rational(TARGET)
    sim = rational_to_block(f)
    print(f"target f = {TARGET}")
    print(f"payload k = {sim.k}, padding r = {sim.r}, "
          f"block length = {sim.block_length}")
    print(f"thresholds d = {list(sim.d)}")
    print(f"           e = {list(sim.e)}")

    print()
    print(f"all {2 ** sim.block_length} words of one block")
    print("------------------------------")
    buckets = {1: [], 0: [], None: []}
    for word in product((0, 1), repeat=sim.block_length):
        buckets[classify_block(sim, word)].append(word)
    for label in (1, 0, None):
        shown = ", ".join("".join(map(str, w)) for w in buckets[label][:8])
        extra = len(buckets[label]) - 8
        tail = f" (+{extra} more)" if extra > 0 else ""
        name = "discard" if label is None else f"answer {label}"
        print(f"{name:9s} {len(buckets[label]):3d} words: {shown}{tail}")

    print()
    print("exactness, two independent ways")
    print("-------------------------------")
    print(f"path-count extraction:  {exact_distribution(sim)}")
    print(f"word-by-word recount:   {brute_force_distribution(sim)}")

    print()
    print(f"seeded run at p = {BIAS} (200000 trials)")
    print("---------------------------------------")
    report = simulate(sim, BIAS, n_trials=200_000, seed=7)
    keep = keep_probability(sim, Fraction(BIAS))
    print(f"estimate {report.estimate:.5f}  target {report.target:.5f}  "
          f"z {report.z_score:+.2f}")
    print(f"mean tosses per output {report.mean_bits_consumed:.2f} "
          f"(exact expectation {sim.block_length / float(keep):.2f}: "
          f"one block per kept word, keep probability {float(keep):.4f})")


if __name__ == "__main__":
    main()
