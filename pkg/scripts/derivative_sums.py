"""Aggregate coefficient sums of D^m, raw and per 2^m, across alpha.

For alpha = 3 the n-sum vanishes for every m and the free sum for m >= 2.

    python scripts/derivative_sums.py --m-max 10
"""

import argparse
import csv
import sys

from collatz_flows import REFERENCE_PAIRS, build_derivative_decomposition


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m-max", type=int, default=10)
    args = parser.parse_args(argv)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["alpha", "beta", "m", "n_coeff_sum", "free_coeff_sum", "n_sum_per_2m", "free_sum_per_2m"])
    for p in REFERENCE_PAIRS:
        for m in range(1, args.m_max + 1):
            d = build_derivative_decomposition(p, m)
            n_norm, free_norm = d.normalized_sums
            out.writerow([p.alpha, p.beta, m, d.n_coeff_sum, d.free_coeff_sum, n_norm, free_norm])


if __name__ == "__main__":
    main()
