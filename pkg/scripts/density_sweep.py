#!/usr/bin/env python3
"""Sweep prime-pair density over modulus sizes.

For each bit size b, counts consecutive prime pairs in [2^(b-1), 2^b]
passing |q - p| < gamma*sqrt(p*q) and prints the count next to the
gamma*x/ln^2(x) reference, so the growth trend can be eyeballed.

Example:
    python scripts/density_sweep.py --bits 10 11 12 13 14 15 16 --rule log_over_sqrt
    python scripts/density_sweep.py --bits 12 16 20 --rule fixed --gamma 1/2
"""

import argparse
import sys
from fractions import Fraction

sys.path.insert(0, "src")

from proxrsa.census import GAMMA_RULES, density_sweep  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bits", type=int, nargs="+", required=True)
    parser.add_argument("--rule", choices=GAMMA_RULES, default="log_over_sqrt")
    parser.add_argument("--gamma", type=str, default=None, help="num/den, for --rule fixed")
    parser.add_argument("--epsilon", type=float, default=0.1, help="for --rule sqrt_eps")
    args = parser.parse_args()

    fixed = None
    if args.gamma is not None:
        num, den = args.gamma.split("/")
        fixed = Fraction(int(num), int(den))

    rows = density_sweep(args.bits, args.rule, fixed, args.epsilon)
    print(f"{'bits':>4} {'gamma':>12} {'primes':>8} {'pairs':>8} {'reference':>12} {'ratio':>8}")
    for b, row in zip(args.bits, rows):
        print(
            f"{b:>4} {float(row.gamma):>12.6f} {row.prime_count:>8} {row.pair_count:>8} "
            f"{row.reference_density:>12.2f} {row.ratio if row.ratio is None else round(row.ratio, 3)!s:>8}"
        )


if __name__ == "__main__":
    main()
