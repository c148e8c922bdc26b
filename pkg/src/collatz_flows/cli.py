"""Command-line front end: ``collatz-flows <subcommand> [options]``.

Exit codes: 0 success, 1 an identity failed (witness on stderr), 2 invalid
configuration or exhausted budget.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .coeffs import DEFAULT_MAX_K, build_coeff_table, coeff_sums, verify_mod_decomposition
from .core import CollatzParams, InvalidParamsError, orbit, parity_bijection_check, parity_codes
from .derivative import build_derivative_decomposition, verify_affine_representation
from .energy import energy_rows
from .errors import BudgetExceeded, IdentityViolation
from .flow import build_flow_closure, growth_monitor
from .report import (
    coeff_payload,
    coeff_rows,
    deriv_payload,
    deriv_rows,
    emit_csv,
    emit_json,
    json_cell,
    write_output,
)
from .spectral import SpectralState
from .verify import CHECKS, GRIDS, run_verification

OUTPUT_DIR_ENV = "COLLATZ_FLOWS_OUTPUT_DIR"
SUBCOMMANDS = ("orbit", "parity", "coeffs", "energy", "deriv", "flow", "verify")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Budgets:
    max_steps: int = 10_000
    max_value: Optional[int] = None
    k_max: int = DEFAULT_MAX_K
    m_max: int = 16
    table_memory: int = 1 << 30  # bytes

    def __post_init__(self) -> None:
        for name in ("max_steps", "k_max", "m_max", "table_memory"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name.replace('_', '-')} must be positive")
        if self.max_value is not None and self.max_value < 1:
            raise ConfigError("max-value must be positive")

    def check_table(self, k: int) -> None:
        if k > self.k_max:
            raise BudgetExceeded(f"k = {k} exceeds k-max = {self.k_max}")
        # all levels up to k, two int64 columns each
        need = 32 * (1 << k)
        if need > self.table_memory:
            raise BudgetExceeded(f"table for k = {k} needs ~{need} bytes, table-memory is {self.table_memory}")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    params: CollatzParams = CollatzParams(3, 1)
    format: str = "csv"
    budgets: Budgets = field(default_factory=Budgets)
    output_path: Optional[Path] = None
    n: Optional[int] = None
    k: Optional[int] = None
    m: int = 1
    sweep: Optional[tuple[int, int]] = None
    check_bijection: bool = False
    verify: bool = False
    init: Optional[str] = None
    t_max: Optional[float] = None
    t_steps: int = 10
    scheme: str = "closed"
    dt: float = 1e-3
    window: Optional[int] = None
    grid: str = "default"
    checks: Optional[tuple[str, ...]] = None
    timings: bool = False

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")


class Failure(Exception):
    """An identity failed; carries partial output and the witness."""

    def __init__(self, message: str, witness: object = None) -> None:
        super().__init__(message)
        self.witness = witness


# -- parsing helpers -----------------------------------------------------------


def parse_sweep(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise ConfigError(f"sweep must look like n0..n1, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise ConfigError(f"sweep needs 1 <= n0 <= n1, got {text!r}")
    return lo, hi


def _freq(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise ConfigError(f"bad frequency {text!r}") from None
    if n < 1:
        raise ConfigError(f"frequencies must be >= 1, got {n}")
    return n


def _amplitude(text: str) -> complex:
    try:
        return complex(text.strip().replace("i", "j"))
    except ValueError:
        raise ConfigError(f"bad amplitude {text!r}") from None


def parse_init(params: CollatzParams, spec: str) -> SpectralState:
    """``delta:5``, ``ones:1,2`` or ``list:3=1.0+0.5i,7=2.0``."""
    kind, sep, body = spec.partition(":")
    if not sep or not body:
        raise ConfigError(f"bad initial data {spec!r}")
    if kind == "delta":
        return SpectralState.delta(params, _freq(body))
    if kind == "ones":
        return SpectralState(params, {_freq(x): 1.0 for x in body.split(",")})
    if kind == "list":
        amps = {}
        for item in body.split(","):
            freq, eq, value = item.partition("=")
            if not eq:
                raise ConfigError(f"list entries are freq=value, got {item!r}")
            amps[_freq(freq)] = _amplitude(value)
        return SpectralState(params, amps)
    raise ConfigError(f"unknown initial data kind {kind!r}")


def _need(value, flag: str):
    if value is None:
        raise ConfigError(f"{flag} is required")
    return value


# -- subcommands ---------------------------------------------------------------


def _orbit(cfg: RunConfig) -> bytes:
    n = _need(cfg.n, "--n")
    rec = orbit(cfg.params, n, max_steps=cfg.budgets.max_steps, max_value=cfg.budgets.max_value)
    if cfg.format == "json":
        return emit_json(
            {
                "params": cfg.params,
                "start": rec.start,
                "values": list(rec.values),
                "cycle_entry_index": rec.cycle_entry_index,
                "cycle_length": rec.cycle_length,
                "terminated_by": rec.terminated_by,
            }
        )
    return emit_csv("orbit", ((i, v, v & 1) for i, v in enumerate(rec.values)))


def _parity(cfg: RunConfig) -> bytes:
    k = _need(cfg.k, "--k")
    if k < 1:
        raise ConfigError("k must be >= 1")
    cfg.budgets.check_table(k)
    ns = np.arange(1, (1 << k) + 1, dtype=np.int64)
    codes = parity_codes(cfg.params, ns, k).tolist()
    vectors = ["".join(str((int(c) >> j) & 1) for j in range(k)) for c in codes]
    bijective = None
    if cfg.check_bijection:
        res = parity_bijection_check(cfg.params, k)
        bijective = res.ok
        if not res:
            raise Failure("parity vectors collide", list(res.witness))
    if cfg.format == "json":
        return emit_json(
            {"params": cfg.params, "k": k, "vectors": dict(zip(ns.tolist(), vectors)), "bijective": bijective}
        )
    return emit_csv("parity", zip(ns.tolist(), vectors))


def _coeffs(cfg: RunConfig) -> bytes:
    k = _need(cfg.k, "--k")
    if k < 0:
        raise ConfigError("k must be >= 0")
    cfg.budgets.check_table(k)
    table = build_coeff_table(cfg.params, k, cfg.budgets.k_max)
    if cfg.verify:
        coeff_sums(table)
        res = verify_mod_decomposition(table)
        if not res:
            raise Failure("affine decomposition failed", res.witness)
    if cfg.format == "json":
        return emit_json(coeff_payload(table))
    return emit_csv("coeffs", coeff_rows(table))


def _energy(cfg: RunConfig) -> bytes:
    k = _need(cfg.k, "--k")
    if k < 0 or cfg.m < 0:
        raise ConfigError("k and m must be nonnegative")
    cfg.budgets.check_table(k)
    n_range = cfg.sweep or (_need(cfg.n, "--n or --sweep"),) * 2
    if n_range[0] < 1:
        raise ConfigError("n must be >= 1")
    rows = [
        (s.n, s.k, s.m, s.s_k, s.s_km, s.energy, v.numerator, v.denominator)
        for s, v in energy_rows(cfg.params, n_range, k, cfg.m)
    ]
    if cfg.format == "json":
        keys = ("n", "k", "m", "s_k", "s_km", "energy", "pseudo_virial_num", "pseudo_virial_den")
        return emit_json({"params": cfg.params, "rows": [dict(zip(keys, r)) for r in rows]})
    return emit_csv("energy", rows)


def _deriv(cfg: RunConfig) -> bytes:
    m = cfg.m
    if m < 1:
        raise ConfigError("m must be >= 1")
    if m > cfg.budgets.m_max:
        raise BudgetExceeded(f"m = {m} exceeds m-max = {cfg.budgets.m_max}")
    cfg.budgets.check_table(m)
    decomp = build_derivative_decomposition(cfg.params, m, cfg.budgets.k_max)
    if cfg.verify:
        res = verify_affine_representation(decomp, exhaustive=m <= 10)
        if not res:
            raise Failure("derivative affine form failed", res.witness)
    if cfg.format == "json":
        return emit_json(deriv_payload(decomp))
    return emit_csv("deriv", deriv_rows(decomp))


def _flow(cfg: RunConfig) -> bytes:
    initial = parse_init(cfg.params, _need(cfg.init, "--init"))
    t_max = _need(cfg.t_max, "--t-max")
    if t_max < 0 or cfg.t_steps < 1 or cfg.dt <= 0:
        raise ConfigError("need t-max >= 0, t-steps >= 1 and dt > 0")
    if cfg.scheme not in ("closed", "rk4", "picard"):
        raise ConfigError(f"unknown scheme {cfg.scheme!r}")
    window = set(initial.support)
    if cfg.window is not None:
        if cfg.window < 1:
            raise ConfigError("window must be >= 1")
        window |= set(range(1, cfg.window + 1))
    closure = build_flow_closure(cfg.params, window, cfg.budgets.max_steps, cfg.budgets.max_value)
    t_grid = [t_max * i / cfg.t_steps for i in range(cfg.t_steps + 1)]
    try:
        run = growth_monitor(closure, initial, t_grid, cfg.scheme, cfg.dt)
    except IdentityViolation as exc:
        raise Failure(str(exc), exc.witness) from None
    shown = sorted(window)
    if cfg.format == "json":
        return emit_json(
            {
                "params": cfg.params,
                "scheme": cfg.scheme,
                "window": shown,
                "closure_size": len(closure.closure),
                "snapshots": [
                    {
                        "t": row.t,
                        "amplitudes": {str(n): state[n] for n in shown},
                        "windowed_norm": row.windowed_norm,
                        "growth_bound": row.growth_bound,
                    }
                    for state, row in zip(run.states, run.rows)
                ],
            }
        )
    rows = (
        (row.t, n, state[n].real, state[n].imag, row.windowed_norm, row.growth_bound)
        for state, row in zip(run.states, run.rows)
        for n in shown
    )
    return emit_csv("flow", rows)


def _verify(cfg: RunConfig) -> bytes:
    if cfg.grid not in GRIDS:
        raise ConfigError(f"grid must be one of {sorted(GRIDS)}")
    if cfg.checks:
        unknown = set(cfg.checks) - set(CHECKS)
        if unknown:
            raise ConfigError(f"unknown checks: {sorted(unknown)}")
    cert = run_verification(cfg.grid, list(cfg.checks) if cfg.checks else None)
    if cfg.format == "json":
        out = emit_json(cert.to_dict(cfg.timings))
    else:
        out = emit_csv("verify", ((c.name, c.status, "" if c.witness is None else json_cell(c.witness)) for c in cert.checks))
    if not cert.ok:
        failed = {c.name: c.witness for c in cert.checks if c.status == "fail"}
        raise Failure("verification failed", {"failed": failed, "output": out.decode()})
    return out


HANDLERS = {
    "orbit": _orbit,
    "parity": _parity,
    "coeffs": _coeffs,
    "energy": _energy,
    "deriv": _deriv,
    "flow": _flow,
    "verify": _verify,
}


def run(config: RunConfig) -> tuple[int, bytes, str]:
    """Dispatch ``config``; returns ``(exit_code, output, message)``."""
    try:
        return 0, HANDLERS[config.subcommand](config), ""
    except Failure as exc:
        witness = exc.witness
        output = b""
        if isinstance(witness, dict) and "output" in witness:
            output = witness["output"].encode()
            witness = witness["failed"]
        return 1, output, f"invariant failure: {exc}\nwitness: {emit_json(witness).decode().strip()}"
    except IdentityViolation as exc:
        return 1, b"", f"invariant failure: {exc}\nwitness: {_safe_witness(exc.witness)}"
    except (ConfigError, InvalidParamsError, BudgetExceeded, ValueError) as exc:
        return 2, b"", f"error: {exc}"


def _safe_witness(w: object) -> str:
    try:
        return emit_json(w).decode().strip()
    except TypeError:
        return repr(w)


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collatz-flows", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser, params: bool = True) -> None:
        if params:
            p.add_argument("--alpha", type=int, required=True)
            p.add_argument("--beta", type=int, required=True)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", type=Path, default=None, help=f"output file (relative paths resolve against ${OUTPUT_DIR_ENV})")
        p.add_argument("--max-steps", type=int, default=Budgets.max_steps)
        p.add_argument("--max-value", type=int, default=None)
        p.add_argument("--k-max", type=int, default=Budgets.k_max)
        p.add_argument("--m-max", type=int, default=Budgets.m_max)
        p.add_argument("--table-memory", type=int, default=Budgets.table_memory)

    p = sub.add_parser("orbit", help="orbit with cycle detection")
    common(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("parity", help="parity vectors on [1, 2^k]")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--check-bijection", action="store_true")

    p = sub.add_parser("coeffs", help="affine coefficient table mod 2^k")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--verify", action="store_true")

    p = sub.add_parser("energy", help="block sums and energy identity")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--sweep", type=str, default=None, metavar="N0..N1")

    p = sub.add_parser("deriv", help="discrete derivative coefficients mod 2^m")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--verify", action="store_true")

    p = sub.add_parser("flow", help="evolve finitely supported data under the flow")
    common(p)
    p.add_argument("--init", required=True, help="delta:5 | ones:1,2 | list:3=1.0+0.5i,7=2.0")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--t-steps", type=int, default=10)
    p.add_argument("--scheme", choices=("closed", "rk4", "picard"), default="closed")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--window", type=int, default=None, help="also report frequencies 1..W")

    p = sub.add_parser("verify", help="run every identity check and emit a certificate")
    common(p, params=False)
    p.add_argument("--grid", choices=sorted(GRIDS), default="default")
    p.add_argument("--check", action="append", dest="checks", metavar="NAME")
    p.add_argument("--timings", action="store_true", help="add elapsed_ms metadata (not reproducible)")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    budgets = Budgets(ns.max_steps, ns.max_value, ns.k_max, ns.m_max, ns.table_memory)
    params = CollatzParams(ns.alpha, ns.beta) if hasattr(ns, "alpha") else CollatzParams(3, 1)
    output = ns.output
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir:
        if output is None:
            output = Path(env_dir) / f"{ns.subcommand}.{ns.format}"
        elif not output.is_absolute():
            output = Path(env_dir) / output
    opts = {
        key: getattr(ns, key)
        for key in ("n", "k", "m", "check_bijection", "verify", "init", "t_max", "t_steps", "scheme", "dt", "window", "grid", "timings")
        if hasattr(ns, key)
    }
    if getattr(ns, "sweep", None):
        opts["sweep"] = parse_sweep(ns.sweep)
    if getattr(ns, "checks", None):
        opts["checks"] = tuple(ns.checks)
    return RunConfig(ns.subcommand, params, ns.format, budgets, output, **opts)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        config = config_from_args(ns)
    except (ConfigError, InvalidParamsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    code, output, message = run(config)
    if message:
        print(message, file=sys.stderr)
    if output:
        if config.output_path is not None:
            write_output(output, config.output_path)
        else:
            sys.stdout.buffer.write(output)
            sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
