"""From a rational target to nonnegative thresholds.

A block procedure needs two integer vectors d <= e: word counts that a
classifier can hit exactly.  Writing the target f = D/E in the basis
p^i (1-p)^(k-i) can leave negative coefficients even when f itself is
perfectly well behaved — (3p^2 - 3p + 1)/2 has numerator coefficients
(1, -1, 1) in that basis.  Multiplying numerator and denominator by
(p + (1-p))^n, which changes nothing, smears every coefficient over its
neighbours; for any polynomial strictly positive on [0, 1] some finite n
makes all coefficients nonnegative.  The smallest such n is found by
direct search, and the search failing is itself informative: targets
that leave (0, 1) are rejected up front, and targets that merely touch
the boundary can never be certified.
"""

from coinfactory import (
    CapExceeded,
    InvalidRange,
    bernstein_from_rational,
    parse_rational,
)

CORPUS = ("1/3", "2*p*(1-p)", "(3*p^2 - 3*p + 1)/2", "p^2", "p/(1+p)")


def main() -> None:
    print("certificates for the block corpus")
    print("---------------------------------")
    for text in CORPUS:
        bp = bernstein_from_rational(parse_rational(text))
        print(f"f = {text}")
        print(f"    exponent {bp.polya_exponent}, degree {bp.degree}")
        print(f"    d = {list(bp.d)}")
        print(f"    e = {list(bp.e)}")
        print(f"    certified ratio rebuilds f exactly: "
              f"{bp.as_rational() == parse_rational(text)}")

    print()
    print("what cannot be certified")
    print("------------------------")
    for text in ("2*p", "1 + p", "p - p^2 + 1"):
        try:
            bernstein_from_rational(parse_rational(text))
            print(f"f = {text}: accepted (unexpected!)")
        except InvalidRange as exc:
            print(f"f = {text}: rejected — {exc}")

    print()
    print("a cap is a budget, not a proof of impossibility")
    print("-----------------------------------------------")
    f = parse_rational("(3*p^2 - 3*p + 1)/2")
    try:
        bernstein_from_rational(f, cap=0)
    except CapExceeded as exc:
        print(f"cap 0 on {f}: {exc}")
    bp = bernstein_from_rational(f, cap=1)
    print(f"cap 1 on {f}: succeeds with exponent {bp.polya_exponent}")


if __name__ == "__main__":
    main()
