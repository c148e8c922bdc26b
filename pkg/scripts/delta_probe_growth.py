"""Windowed norm of the evolved delta at a pivot against the I0 bound.

Shows how much of the bound I0(2 sqrt2 t) the preimage tree inside a finite
window actually uses, for several window sizes.

    python scripts/delta_probe_growth.py --pivot 5 --windows 100 1000 10000
"""

import argparse
import csv
import sys
from dataclasses import dataclass, field

import numpy as np

from collatz_flows import CollatzParams, delta_probe


@dataclass(frozen=True)
class ProbeConfig:
    alpha: int = 3
    beta: int = 1
    pivot: int = 5
    windows: tuple[int, ...] = (100, 1_000, 10_000)
    t_grid: tuple[float, ...] = field(default_factory=lambda: tuple(np.round(np.linspace(0.25, 3.0, 12), 4)))


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=int, default=ProbeConfig.alpha)
    parser.add_argument("--beta", type=int, default=ProbeConfig.beta)
    parser.add_argument("--pivot", type=int, default=ProbeConfig.pivot)
    parser.add_argument("--windows", type=int, nargs="+", default=list(ProbeConfig.windows))
    args = parser.parse_args(argv)
    cfg = ProbeConfig(args.alpha, args.beta, args.pivot, tuple(args.windows))
    params = CollatzParams(cfg.alpha, cfg.beta)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["window", "hits", "max_depth", "t", "norm_sq", "i0_bound", "fraction_of_bound"])
    for window in cfg.windows:
        probe = delta_probe(params, cfg.pivot, window, cfg.t_grid)
        depth = max(probe.hits.values())
        for row in probe.rows:
            out.writerow(
                [window, len(probe.hits), depth, row.t, f"{row.norm_sq:.6g}", f"{row.bessel_bound:.6g}", f"{row.norm_sq / row.bessel_bound:.4f}"]
            )


if __name__ == "__main__":
    main()
