"""Run every identity and bound of the library and collect a certificate."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import __version__
from .coeffs import build_coeff_table, coeff_sums, coeff_tables, verify_mod_decomposition
from .core import (
    REFERENCE_PAIRS,
    CollatzParams,
    apply,
    iterate,
    iterate_array,
    orbit,
    parity_bijection_check,
    parity_codes,
    parity_vector,
)
from .derivative import (
    build_derivative_decomposition,
    discrete_derivative_value,
    verify_affine_representation,
)
from .energy import (
    bracket_sweep,
    energy_sweep,
    pseudo_virial_sweep,
    shift_sweep,
    step_bounds_check,
)
from .errors import CheckResult, IdentityViolation
from .flow import (
    build_flow_closure,
    cycle_modes,
    delta_probe,
    growth_monitor,
    rk4_integrate,
    solve_closed_form,
    solve_numerical,
    taylor_tail,
)
from .spectral import (
    SpectralState,
    adjoint_kernel_basis,
    apply_adjoint,
    apply_operator,
    doubles,
    inner,
    norm_certificates,
)

ALG_TOL = 1e-12
SOLVER_TOL = 1e-9


@dataclass(frozen=True)
class VerifyGrid:
    pairs: tuple[CollatzParams, ...] = REFERENCE_PAIRS
    n_max: int = 10_000
    k_max: int = 12
    k_sums: int = 20
    k_parity: int = 16
    m_shift: int = 8
    m_sums: int = 10
    m_affine: int = 8
    samples: int = 100_000
    random_states: int = 1_000
    kernel_n_max: int = 1_000
    flow_window: int = 64
    flow_times: tuple[float, ...] = (0.5, 1.0, 2.0)
    probe_window: int = 10_000
    seed: int = 20240601


GRIDS = {
    "default": VerifyGrid(),
    "quick": VerifyGrid(
        n_max=300,
        k_max=8,
        k_sums=12,
        k_parity=10,
        m_shift=3,
        m_sums=6,
        m_affine=5,
        samples=2_000,
        random_states=100,
        kernel_n_max=100,
        flow_window=16,
        probe_window=1_000,
    ),
}


@dataclass
class CheckRecord:
    name: str
    status: str
    witness: Optional[object] = None
    elapsed_ms: float = 0.0


@dataclass
class VerificationCertificate:
    suite_version: str
    param_grid: list[tuple[int, int]]
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "suite_version": self.suite_version,
            "param_grid": [list(p) for p in self.param_grid],
            "checks": [
                {"name": c.name, "status": c.status, "witness": c.witness} for c in self.checks
            ],
            "all_pass": self.ok,
        }
        if timings:
            out["metadata"] = {"elapsed_ms": {c.name: round(c.elapsed_ms, 3) for c in self.checks}}
        return out


# -- collatz_core ------------------------------------------------------------


def check_integrality(g: VerifyGrid) -> CheckResult:
    rng = random.Random(g.seed)
    count = min(g.samples, 10_000)
    for p in g.pairs:
        for _ in range(count):
            n = rng.getrandbits(512) | 1
            if (p.alpha * n + p.beta) % 2 or 2 * apply(p, n) != p.alpha * n + p.beta:
                return CheckResult(False, count, {"params": _pair(p), "n": n})
    return CheckResult(True, count * len(g.pairs))


def check_odd_symmetry(g: VerifyGrid) -> CheckResult:
    rng = random.Random(g.seed + 1)
    for p in g.pairs:
        if apply(p, 0) != 0:
            return CheckResult(False, 0, {"params": _pair(p), "n": 0})
        for _ in range(min(g.samples, 10_000)):
            n = rng.randrange(1, 1 << 256)
            if apply(p, -n) != -apply(p, n):
                return CheckResult(False, 0, {"params": _pair(p), "n": n})
    return CheckResult(True, len(g.pairs))


def check_parity_flip(g: VerifyGrid) -> CheckResult:
    checked = 0
    for p in g.pairs:
        for k in range(1, g.k_max + 1):
            ns = np.arange(1, 2**k + 1, dtype=np.int64)
            same = parity_codes(p, ns, k) == parity_codes(p, ns + 2**k, k)
            flip = (iterate_array(p, ns, k) & 1) != (iterate_array(p, ns + 2**k, k) & 1)
            bad = np.nonzero(~(same & flip))[0]
            checked += len(ns)
            if len(bad):
                return CheckResult(False, checked, {"params": _pair(p), "k": k, "n": int(ns[bad[0]])})
    return CheckResult(True, checked)


def check_parity_bijection(g: VerifyGrid) -> CheckResult:
    for p in g.pairs:
        for k in range(1, g.k_parity + 1):
            res = parity_bijection_check(p, k)
            if not res:
                return CheckResult(False, k, {"params": _pair(p), "k": k, "collision": list(res.witness)})
    return CheckResult(True, len(g.pairs) * g.k_parity)


PARITY_EXAMPLE = {
    1: (1, 1, 0), 2: (0, 1, 1), 3: (1, 0, 0), 4: (0, 0, 1),
    5: (1, 1, 1), 6: (0, 1, 0), 7: (1, 0, 1), 8: (0, 0, 0),
}


def check_parity_example(g: VerifyGrid) -> CheckResult:
    p = CollatzParams(5, 1)
    for n, bits in PARITY_EXAMPLE.items():
        got = parity_vector(p, n, 3).bits
        if got != bits:
            return CheckResult(False, n, {"n": n, "got": list(got), "expected": list(bits)})
    return CheckResult(True, 8)


def check_cycle_minimality(g: VerifyGrid) -> CheckResult:
    checked = 0
    for p in g.pairs:
        for n in range(1, min(g.n_max, 2_000) + 1):
            rec = orbit(p, n, max_steps=2_000)
            if not rec.cycle_found:
                continue
            checked += 1
            vals = rec.values
            mu, lam = rec.cycle_entry_index, rec.cycle_length
            if vals[mu + lam] != vals[mu] or len(set(vals[: mu + lam])) != mu + lam:
                return CheckResult(False, checked, {"params": _pair(p), "n": n})
            if any(vals[j + 1] != apply(p, vals[j]) for j in range(len(vals) - 1)):
                return CheckResult(False, checked, {"params": _pair(p), "n": n})
    return CheckResult(True, checked)


# -- affine_coeffs -----------------------------------------------------------


def check_coeff_sums(g: VerifyGrid) -> CheckResult:
    for p in g.pairs:
        for table in coeff_tables(p, g.k_sums)[1:]:
            try:
                coeff_sums(table)
            except IdentityViolation as exc:
                return CheckResult(False, table.k, {"params": _pair(p), "k": table.k, "error": str(exc)})
    return CheckResult(True, len(g.pairs) * g.k_sums)


def check_power_of_alpha(g: VerifyGrid) -> CheckResult:
    """Exponent of ``a(i, k)`` equals the number of odd steps in ``P_k(i)``."""
    checked = 0
    for p in g.pairs:
        for table in coeff_tables(p, g.k_max)[1:]:
            k = table.k
            reps = np.arange(2**k, dtype=np.int64)
            reps[0] = 2**k
            codes = parity_codes(p, reps, k).tolist()
            try:
                exps = table.alpha_exponents()
            except IdentityViolation as exc:
                return CheckResult(False, checked, {"params": _pair(p), "k": k, "error": str(exc)})
            for i, (code, e) in enumerate(zip(codes, exps)):
                ones = bin(int(code)).count("1")
                if p.alpha > 1 and ones != e:
                    return CheckResult(False, checked, {"params": _pair(p), "k": k, "residue": i})
            checked += len(codes)
    return CheckResult(True, checked)


def check_recurrence(g: VerifyGrid) -> CheckResult:
    """Level k+1 refines level k: each row is the parent row or its odd-step update."""
    for p in g.pairs:
        tables = coeff_tables(p, g.k_max)
        for k in range(1, g.k_max):
            lo, hi = tables[k].to_lists(), tables[k + 1].to_lists()
            for j in range(2 ** (k + 1)):
                a_par, b_par = lo[0][j % 2**k], lo[1][j % 2**k]
                a, b = hi[0][j], hi[1][j]
                even = (a, b) == (a_par, b_par)
                odd = (a, b) == (p.alpha * a_par, p.alpha * b_par + 2**k * p.beta)
                rep = j or 2 ** (k + 1)
                expect_odd = iterate(p, rep, k) % 2 == 1
                if not (odd if expect_odd else even):
                    return CheckResult(False, k, {"params": _pair(p), "k": k, "residue": j})
    return CheckResult(True, len(g.pairs) * g.k_max)


def check_decomposition(g: VerifyGrid) -> CheckResult:
    checked = 0
    for p in g.pairs:
        for table in coeff_tables(p, g.k_max)[1:]:
            res = verify_mod_decomposition(table, sample_count=100, seed=g.seed)
            checked += res.checked
            if not res:
                return CheckResult(False, checked, {"params": _pair(p), "k": table.k, **res.witness})
    return CheckResult(True, checked)


def check_beta_independence(g: VerifyGrid) -> CheckResult:
    """a-values as a multiset do not depend on beta; per residue they depend on beta mod 2^k.

    For alpha > 1 exactly ``binom(k, e)`` residues carry ``alpha^e``.
    """
    alphas = sorted({p.alpha for p in g.pairs})
    checked = 0
    for alpha in alphas:
        betas = [b for b in range(1, 64, 2) if math.gcd(alpha, b) == 1][:6]
        for k in range(1, g.k_max + 1):
            tables = {b: build_coeff_table(CollatzParams(alpha, b), k) for b in betas}
            ref = sorted(tables[betas[0]].to_lists()[0])
            exps = tables[betas[0]].alpha_exponents()
            if alpha > 1 and any(exps.count(e) != math.comb(k, e) for e in range(k + 1)):
                return CheckResult(False, checked, {"alpha": alpha, "k": k, "exponents": "distribution"})
            for b, table in tables.items():
                checked += 1
                if sorted(table.to_lists()[0]) != ref:
                    return CheckResult(False, checked, {"alpha": alpha, "beta": b, "k": k})
                shifted = b + (1 << k)
                while math.gcd(alpha, shifted) != 1:
                    shifted += 1 << k
                if build_coeff_table(CollatzParams(alpha, shifted), k).to_lists()[0] != table.to_lists()[0]:
                    return CheckResult(False, checked, {"alpha": alpha, "beta": b, "beta_shifted": shifted, "k": k})
    return CheckResult(True, checked)


# -- energy_invariants -------------------------------------------------------


def _energy_check(fn: Callable[..., CheckResult], *extra) -> Callable[[VerifyGrid], CheckResult]:
    def run(g: VerifyGrid) -> CheckResult:
        checked = 0
        for p in g.pairs:
            res = fn(p, (1, g.n_max), range(1, g.k_max + 1), *[e(g) for e in extra])
            checked += res.checked
            if not res:
                return CheckResult(False, checked, {"params": _pair(p), **res.witness})
        return CheckResult(True, checked)

    return run


def check_step_bounds(g: VerifyGrid) -> CheckResult:
    checked = 0
    for p in g.pairs:
        res = step_bounds_check(p, g.samples, g.seed)
        checked += res.checked
        if not res:
            return CheckResult(False, checked, {"params": _pair(p), **res.witness})
    return CheckResult(True, checked)


# -- discrete_derivative -----------------------------------------------------


def check_deriv_sums(g: VerifyGrid) -> CheckResult:
    for p in g.pairs:
        for m in range(1, g.m_sums + 1):
            try:
                build_derivative_decomposition(p, m)
            except IdentityViolation as exc:
                return CheckResult(False, m, {"params": _pair(p), "m": m, "error": str(exc)})
    return CheckResult(True, len(g.pairs) * g.m_sums)


def check_deriv_affine(g: VerifyGrid) -> CheckResult:
    checked = 0
    for p in g.pairs:
        for m in range(1, g.m_affine + 1):
            res = verify_affine_representation(build_derivative_decomposition(p, m), exhaustive=True)
            checked += res.checked
            if not res:
                return CheckResult(False, checked, {"params": _pair(p), "m": m, **res.witness})
    return CheckResult(True, checked)


def check_collatz_nullity(g: VerifyGrid) -> CheckResult:
    """alpha = 3: zero n-sum for m >= 1 and zero free sum for m >= 2; alpha = 1: |sums| = 2^m, beta 2^(m-1)."""
    for beta in (1, 5):
        p = CollatzParams(3, beta)
        for m in range(1, g.m_sums + 1):
            d = build_derivative_decomposition(p, m)
            free_want = beta if m == 1 else 0
            if d.n_coeff_sum != 0 or d.free_coeff_sum != free_want:
                return CheckResult(False, m, {"params": _pair(p), "m": m})
    p = CollatzParams(1, 1)
    for m in range(1, g.m_sums + 1):
        d = build_derivative_decomposition(p, m)
        n_norm, free_norm = d.normalized_sums
        if d.n_coeff_sum != (-2) ** m or d.free_coeff_sum != (-2) ** (m - 1):
            return CheckResult(False, m, {"params": _pair(p), "m": m})
        if n_norm != (-1) ** m or free_norm != Fraction((-1) ** (m - 1), 2):
            return CheckResult(False, m, {"params": _pair(p), "m": m, "normalized": True})
    return CheckResult(True, 3 * g.m_sums)


def check_binomial_consistency(g: VerifyGrid) -> CheckResult:
    rng = random.Random(g.seed + 2)
    for p in g.pairs:
        for _ in range(g.samples // len(g.pairs)):
            n, k = rng.randrange(1, 1 << 40), rng.randrange(0, 20)
            if discrete_derivative_value(p, n, k, 1) != iterate(p, n, k + 1) - iterate(p, n, k):
                return CheckResult(False, 0, {"params": _pair(p), "n": n, "k": k})
    return CheckResult(True, g.samples)


# -- spectral_flow -----------------------------------------------------------


def random_state(p: CollatzParams, rng: np.random.Generator, n_max: int = 200, size: int = 12) -> SpectralState:
    freqs = rng.choice(np.arange(1, n_max + 1), size=size, replace=False)
    vals = rng.normal(size=size) + 1j * rng.normal(size=size)
    return SpectralState(p, {int(n): complex(v) for n, v in zip(freqs, vals)})


def check_adjoint_identity(g: VerifyGrid) -> CheckResult:
    rng = np.random.default_rng(g.seed)
    for p in g.pairs:
        for _ in range(g.random_states):
            u, v = random_state(p, rng), random_state(p, rng, size=40)
            lhs, rhs = inner(apply_operator(u), v), inner(u, apply_adjoint(v))
            if abs(lhs - rhs) > ALG_TOL * max(1.0, abs(lhs)):
                return CheckResult(False, 0, {"params": _pair(p), "lhs": str(lhs), "rhs": str(rhs)})
    return CheckResult(True, g.random_states * len(g.pairs))


def check_sandwich(g: VerifyGrid) -> CheckResult:
    rng = np.random.default_rng(g.seed + 1)
    for p in g.pairs:
        states = [random_state(p, rng) for _ in range(g.random_states)]
        for cert in norm_certificates(p, states, ALG_TOL):
            if not cert.sandwich_ok:
                return CheckResult(False, 0, {"params": _pair(p), "norm": cert.norm, "image": cert.image_norm})
    return CheckResult(True, g.random_states * len(g.pairs))


def equality_set_states(p: CollatzParams, rng: np.random.Generator, count: int) -> list[SpectralState]:
    pool_s = [m for m in range(1, 400) if not doubles(p, m)]
    pool_t = [m for m in range(1, 400) if doubles(p, m)]
    out = []
    for pool in (pool_s, pool_t):
        if not pool:
            continue
        for _ in range(count):
            size = min(8, len(pool))
            freqs = rng.choice(pool, size=size, replace=False)
            vals = rng.normal(size=size) + 1j * rng.normal(size=size)
            out.append(SpectralState(p, {int(n): complex(v) for n, v in zip(freqs, vals)}))
    return out


def check_equality_sets(g: VerifyGrid) -> CheckResult:
    rng = np.random.default_rng(g.seed + 2)
    checked = 0
    for p in g.pairs:
        for cert in norm_certificates(p, equality_set_states(p, rng, g.random_states // 10 or 1), ALG_TOL):
            checked += 1
            if cert.support_set not in ("S", "T") or not cert.equality_ok:
                return CheckResult(False, checked, {"params": _pair(p), "set": cert.support_set})
    return CheckResult(True, checked)


def check_kernel(g: VerifyGrid) -> CheckResult:
    for p in g.pairs:
        for vec in adjoint_kernel_basis(p, g.kernel_n_max):
            if apply_adjoint(vec).amplitudes:
                return CheckResult(False, 0, {"params": _pair(p), "support": sorted(vec.support)})
    return CheckResult(True, len(g.pairs))


def check_kernel_orthogonality(g: VerifyGrid) -> CheckResult:
    for p in g.pairs:
        basis = adjoint_kernel_basis(p, g.kernel_n_max)
        seen: set[int] = set()
        for vec in basis:
            if seen & vec.support:
                return CheckResult(False, 0, {"params": _pair(p), "support": sorted(vec.support)})
            seen |= vec.support
    return CheckResult(True, len(g.pairs))


def _flow_cases(g: VerifyGrid):
    rng = np.random.default_rng(g.seed + 3)
    for p in (CollatzParams(3, 1), CollatzParams(1, 1)):
        window = range(1, g.flow_window + 1)
        closure = build_flow_closure(p, window)
        vals = rng.normal(size=g.flow_window) + 1j * rng.normal(size=g.flow_window)
        yield p, closure, SpectralState(p, {n: complex(v) for n, v in zip(window, vals)})


def check_solver_agreement(g: VerifyGrid) -> CheckResult:
    worst = 0.0
    for p, closure, u0 in _flow_cases(g):
        for t in g.flow_times:
            exact = solve_closed_form(closure, u0, t)
            numeric = solve_numerical(closure, u0, t, "rk4", 1e-3)
            err = max(abs(exact[n] - numeric[n]) for n in closure.closure)
            worst = max(worst, err)
            if err > SOLVER_TOL:
                return CheckResult(False, 0, {"params": _pair(p), "t": t, "max_error": err})
    return CheckResult(True, 2 * len(g.flow_times), {"max_error": worst})


def check_cycle_modes(g: VerifyGrid) -> CheckResult:
    for p, closure, u0 in _flow_cases(g):
        modes = cycle_modes(closure, u0)
        for cid, nodes in closure.cycles.items():
            dec = modes[cid]
            m = dec.cycle_length
            if np.max(np.abs(np.abs(dec.lambdas) - 1)) > ALG_TOL or np.max(np.abs(dec.lambdas**m - 1)) > ALG_TOL:
                return CheckResult(False, 0, {"params": _pair(p), "cycle": list(nodes)})
            for phase, z in enumerate(nodes):
                for t in g.flow_times:
                    value = solve_closed_form(closure, u0, t)[z]
                    if abs(dec.value(phase, t, derivative=m) - value) > SOLVER_TOL:
                        return CheckResult(False, 0, {"params": _pair(p), "frequency": z, "t": t})
    return CheckResult(True, 2)


def check_central_difference(g: VerifyGrid) -> CheckResult:
    h = 1e-4
    for p, closure, u0 in _flow_cases(g):
        for t in g.flow_times:
            plus = solve_closed_form(closure, u0, t + h)
            minus = solve_closed_form(closure, u0, t - h)
            now = solve_closed_form(closure, u0, t)
            for n in closure.closure:
                deriv = (plus[n] - minus[n]) / (2 * h)
                target = now[closure.edges[n]]
                if abs(deriv - target) > 1e-6 * max(1.0, abs(target)):
                    return CheckResult(False, 0, {"params": _pair(p), "frequency": n, "t": t})
    return CheckResult(True, 2 * len(g.flow_times))


def check_divergent_tail(g: VerifyGrid) -> CheckResult:
    """Truncated chain from an alpha = 5 orbit: Taylor tail vs RK4."""
    p = CollatzParams(5, 1)
    rec = orbit(p, 7, max_steps=40)
    chain = rec.values
    rng = np.random.default_rng(g.seed + 4)
    data = (rng.normal(size=len(chain)) + 1j * rng.normal(size=len(chain))) / np.arange(1, len(chain) + 1)
    succ = np.arange(1, len(chain) + 1)
    succ[-1] = -1
    for t in g.flow_times:
        err = float(np.max(np.abs(taylor_tail(data, t) - rk4_integrate(succ, data, t, 1e-3))))
        if err > 1e-8:
            return CheckResult(False, 0, {"t": t, "max_error": err})
    return CheckResult(True, len(g.flow_times))


def check_growth_bound(g: VerifyGrid) -> CheckResult:
    runs = 0
    try:
        for _, closure, u0 in _flow_cases(g):
            for scheme in ("closed", "rk4", "picard"):
                growth_monitor(closure, u0, (0.0,) + g.flow_times, scheme, dt=1e-3 if scheme == "rk4" else 0.4)
                runs += 1
    except IdentityViolation as exc:
        row = exc.witness
        return CheckResult(False, runs, {"t": row.t, "norm": row.windowed_norm, "bound": row.growth_bound})
    return CheckResult(True, runs)


def check_eigenvector(g: VerifyGrid) -> CheckResult:
    p = CollatzParams(3, 1)
    closure = build_flow_closure(p, {1, 2})
    u0 = SpectralState(p, {1: 1.0, 2: 1.0})
    for t in g.flow_times:
        for scheme in ("closed", "rk4"):
            state = (
                solve_closed_form(closure, u0, t)
                if scheme == "closed"
                else solve_numerical(closure, u0, t, "rk4", 1e-3)
            )
            for n in (1, 2):
                if abs(state[n] - math.exp(t)) > SOLVER_TOL:
                    return CheckResult(False, 0, {"t": t, "scheme": scheme, "frequency": n})
    return CheckResult(True, 2 * len(g.flow_times))


def check_delta_probe(g: VerifyGrid) -> CheckResult:
    try:
        probe = delta_probe(CollatzParams(3, 1), 5, g.probe_window, g.flow_times)
    except IdentityViolation as exc:
        return CheckResult(False, 0, {"t": exc.witness.t})
    if probe.hits.get(13) != 3 or probe.hits.get(5) != 0:
        return CheckResult(False, 0, {"m_13": probe.hits.get(13)})
    for row in probe.rows:
        if abs(probe.amplitude(13, row.t) - row.t**3 / 6) > ALG_TOL:
            return CheckResult(False, 0, {"t": row.t})
    return CheckResult(True, len(probe.rows), {"hits": len(probe.hits)})


# -- serialization -----------------------------------------------------------


def check_round_trip(g: VerifyGrid) -> CheckResult:
    from .report import coeff_payload, deriv_payload, emit_json, load_coeff_table, load_deriv

    for p in g.pairs:
        table = build_coeff_table(p, min(g.k_sums, 12))
        if load_coeff_table(emit_json(coeff_payload(table))) != table:
            return CheckResult(False, 0, {"params": _pair(p), "table": "coeffs"})
        decomp = build_derivative_decomposition(p, g.m_affine)
        if load_deriv(emit_json(deriv_payload(decomp))) != decomp:
            return CheckResult(False, 0, {"params": _pair(p), "table": "deriv"})
    return CheckResult(True, 2 * len(g.pairs))


def check_determinism(g: VerifyGrid) -> CheckResult:
    from .report import coeff_payload, emit_json

    p = CollatzParams(7, 3)
    first = emit_json(coeff_payload(build_coeff_table(p, g.k_sums)))
    second = emit_json(coeff_payload(build_coeff_table(p, g.k_sums)))
    if first != second:
        return CheckResult(False, 1, {"params": _pair(p)})
    return CheckResult(True, 1)


CHECKS: dict[str, Callable[[VerifyGrid], CheckResult]] = {
    "core.integrality": check_integrality,
    "core.odd_symmetry": check_odd_symmetry,
    "core.parity_flip": check_parity_flip,
    "core.parity_bijection": check_parity_bijection,
    "core.parity_worked_example": check_parity_example,
    "core.cycle_minimality": check_cycle_minimality,
    "coeffs.sums": check_coeff_sums,
    "coeffs.power_of_alpha": check_power_of_alpha,
    "coeffs.recurrence_consistency": check_recurrence,
    "coeffs.exact_decomposition": check_decomposition,
    "coeffs.beta_distribution": check_beta_independence,
    "energy.conservation": _energy_check(energy_sweep),
    "energy.shift_telescoping": _energy_check(shift_sweep, lambda g: g.m_shift),
    "energy.brackets": _energy_check(bracket_sweep),
    "energy.pseudo_virial": _energy_check(pseudo_virial_sweep),
    "energy.step_bounds": check_step_bounds,
    "deriv.aggregate_sums": check_deriv_sums,
    "deriv.affine_faithfulness": check_deriv_affine,
    "deriv.collatz_nullity": check_collatz_nullity,
    "deriv.binomial_consistency": check_binomial_consistency,
    "spectral.adjoint_identity": check_adjoint_identity,
    "spectral.sandwich": check_sandwich,
    "spectral.equality_sets": check_equality_sets,
    "spectral.kernel": check_kernel,
    "spectral.kernel_orthogonality": check_kernel_orthogonality,
    "flow.solver_agreement": check_solver_agreement,
    "flow.cycle_modes": check_cycle_modes,
    "flow.central_difference": check_central_difference,
    "flow.divergent_tail": check_divergent_tail,
    "flow.growth_bound": check_growth_bound,
    "flow.eigenvector": check_eigenvector,
    "flow.delta_probe": check_delta_probe,
    "cli.round_trip": check_round_trip,
    "cli.determinism": check_determinism,
}


def run_verification(
    grid: VerifyGrid | str = "default", only: Optional[list[str]] = None
) -> VerificationCertificate:
    if isinstance(grid, str):
        grid = GRIDS[grid]
    cert = VerificationCertificate(__version__, [(p.alpha, p.beta) for p in grid.pairs])
    for name, fn in CHECKS.items():
        if only is not None and name not in only:
            continue
        start = time.perf_counter()
        try:
            res = fn(grid)
        except IdentityViolation as exc:
            res = CheckResult(False, 0, {"error": str(exc)})
        elapsed = (time.perf_counter() - start) * 1e3
        witness = res.witness if not res.ok else None
        cert.checks.append(CheckRecord(name, "pass" if res.ok else "fail", witness, elapsed))
    return cert


def _pair(p: CollatzParams) -> list[int]:
    return [p.alpha, p.beta]
