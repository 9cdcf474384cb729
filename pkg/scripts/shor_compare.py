#!/usr/bin/env python3
"""Close vs wide prime pairs under exact period-finding statistics.

Samples moduli from both populations at a given bit size, averages the
measurement success probability over seeded bases, and prints the group
means side by side.  Output is data; whether proximity helps or hurts at
toy scale is left to the reader.

Example:
    python scripts/shor_compare.py --bits 12 --pairs 10 --gamma 0.35
    python scripts/shor_compare.py --bits 14 --pairs 8 --gamma 0.2 --bases 10
"""

import argparse
import sys

sys.path.insert(0, "src")

from proxrsa.numerics import SeedStream  # noqa: E402
from proxrsa.shor_sim import compare_moduli  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bits", type=int, default=12)
    parser.add_argument("--pairs", type=int, default=10)
    parser.add_argument("--gamma", type=float, default=0.35)
    parser.add_argument("--bases", type=int, default=20)
    parser.add_argument("--seed", type=str, default="00" * 32)
    args = parser.parse_args()

    stream = SeedStream(bytes.fromhex(args.seed))
    report = compare_moduli(args.bits, args.pairs, args.gamma, stream, bases_per_modulus=args.bases)

    print(f"{'group':>8} {'N':>8} {'p':>6} {'q':>6} {'delta':>9} {'plain':>8} {'refined':>8}")
    for row in report.rows:
        print(
            f"{row.group:>8} {row.n:>8} {row.p:>6} {row.q:>6} {row.delta:>9.4f} "
            f"{row.mean_success_prob:>8.4f} {row.mean_success_prob_refined:>8.4f}"
        )
    print()
    for group, stats in report.group_summary().items():
        print(
            f"{group}: n={stats['count']} mean_delta={stats['mean_delta']:.4f} "
            f"plain={stats['mean_success_prob']:.4f} refined={stats['mean_success_prob_refined']:.4f}"
        )


if __name__ == "__main__":
    main()
