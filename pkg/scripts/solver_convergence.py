"""Error of RK4 and Picard against the closed form as the step shrinks.

    python scripts/solver_convergence.py --window 64 --t 2.0
"""

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from collatz_flows import CollatzParams, SpectralState, build_flow_closure, solve_closed_form, solve_numerical


@dataclass(frozen=True)
class ConvergenceConfig:
    alpha: int = 3
    beta: int = 1
    window: int = 64
    t: float = 2.0
    seed: int = 0
    steps: tuple[float, ...] = (0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=int, default=ConvergenceConfig.alpha)
    parser.add_argument("--beta", type=int, default=ConvergenceConfig.beta)
    parser.add_argument("--window", type=int, default=ConvergenceConfig.window)
    parser.add_argument("--t", type=float, default=ConvergenceConfig.t)
    parser.add_argument("--seed", type=int, default=ConvergenceConfig.seed)
    args = parser.parse_args(argv)
    cfg = ConvergenceConfig(args.alpha, args.beta, args.window, args.t, args.seed)

    params = CollatzParams(cfg.alpha, cfg.beta)
    rng = np.random.default_rng(cfg.seed)
    vals = rng.normal(size=cfg.window) + 1j * rng.normal(size=cfg.window)
    u0 = SpectralState(params, {n + 1: complex(v) for n, v in enumerate(vals)})
    closure = build_flow_closure(params, range(1, cfg.window + 1))
    exact = solve_closed_form(closure, u0, cfg.t)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["dt", "rk4_max_error", "picard_max_error"])
    for dt in cfg.steps:
        errs = []
        for scheme in ("rk4", "picard"):
            state = solve_numerical(closure, u0, cfg.t, scheme, dt)
            errs.append(max(abs(state[n] - exact[n]) for n in closure.closure))
        out.writerow([dt, f"{errs[0]:.3e}", f"{errs[1]:.3e}"])


if __name__ == "__main__":
    main()
