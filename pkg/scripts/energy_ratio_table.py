"""Block ratio s_{k,m}(n) / s_k(n) with its finite-k bracket, for growing k.

    python scripts/energy_ratio_table.py --alpha 3 --beta 1 --n 1 --m 1 --k-max 12
"""

import argparse
import csv
import sys
from dataclasses import dataclass

from collatz_flows import CollatzParams, pseudo_virial, ratio_report


@dataclass(frozen=True)
class RatioConfig:
    alpha: int = 3
    beta: int = 1
    n: int = 1
    m: int = 1
    k_max: int = 12


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(RatioConfig()).items():
        parser.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    cfg = RatioConfig(**vars(parser.parse_args(argv)))
    params = CollatzParams(cfg.alpha, cfg.beta)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["k", "ratio", "lower", "upper", "pseudo_virial"])
    for row in ratio_report(params, cfg.n, cfg.m, cfg.k_max):
        out.writerow(
            [row.k, f"{float(row.ratio):.9f}", f"{float(row.lower):.9f}", f"{float(row.upper):.9f}", pseudo_virial(params, cfg.n, row.k)]
        )


if __name__ == "__main__":
    main()
