"""The linear flow ``d/dt u_n = u_{C(n)}`` on a forward-closed set of frequencies.

Starting from finitely supported data, the coordinates on a window depend only
on the forward orbits of its frequencies, so the flow restricted to the
forward closure is an exact finite system. Every coordinate is either on an
``m``-cycle (a combination of ``exp(lambda t)`` with ``lambda^m = 1``) or
``ell`` steps upstream of one (a degree ``ell - 1`` polynomial plus a shifted
copy of the cycle modes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Optional, Sequence

import numpy as np

from .core import CollatzParams, apply, orbit
from .errors import BudgetExceeded, IdentityViolation
from .spectral import SpectralState

SOLVER_TOL = 1e-9
PICARD_SUBINTERVAL = 0.4


class ClosureBudgetExceeded(BudgetExceeded):
    """A window orbit did not close within the step/value budgets."""

    def __init__(self, frequency: int, reason: str) -> None:
        super().__init__(f"orbit of {frequency} did not reach a cycle ({reason})")
        self.frequency = frequency


class PicardNotConverged(RuntimeError):
    pass


@dataclass(frozen=True)
class OrbitMeta:
    ell: int  # steps until the cycle is reached
    cycle_length: int
    cycle_phase: int  # position of C^ell(n) in its cycle, counted from the cycle minimum
    cycle_id: int  # smallest frequency on the cycle


@dataclass(frozen=True)
class FlowClosure:
    params: CollatzParams
    window: frozenset[int]
    closure: frozenset[int]
    edges: Mapping[int, int]
    orbit_meta: Mapping[int, OrbitMeta]
    cycles: Mapping[int, tuple[int, ...]]

    def frequencies(self) -> list[int]:
        return sorted(self.closure)

    def path_to_cycle(self, n: int) -> list[int]:
        """``n, C(n), ..., C^ell(n)``."""
        path = [n]
        for _ in range(self.orbit_meta[n].ell):
            path.append(self.edges[path[-1]])
        return path


def build_flow_closure(
    params: CollatzParams,
    window: Iterable[int],
    max_steps: int = 100_000,
    max_value: Optional[int] = None,
) -> FlowClosure:
    window = frozenset(window)
    if not window:
        raise ValueError("window must be nonempty")
    if min(window) < 1:
        raise ValueError("frequencies must be >= 1")
    edges: dict[int, int] = {}
    meta: dict[int, OrbitMeta] = {}
    cycles: dict[int, tuple[int, ...]] = {}
    for w in sorted(window):
        if w in meta:
            continue
        rec = orbit(params, w, max_steps=max_steps, max_value=max_value)
        if not rec.cycle_found:
            raise ClosureBudgetExceeded(w, rec.terminated_by.value)
        mu, lam = rec.cycle_entry_index, rec.cycle_length
        cyc = rec.values[mu : mu + lam]
        low = cyc.index(min(cyc))
        canonical = cyc[low:] + cyc[:low]
        cycles.setdefault(canonical[0], canonical)
        for i, v in enumerate(rec.values[: mu + lam]):
            edges[v] = rec.values[i + 1]
            if v in meta:
                continue
            if i >= mu:
                meta[v] = OrbitMeta(0, lam, (i - mu - low) % lam, canonical[0])
            else:
                meta[v] = OrbitMeta(mu - i, lam, (-low) % lam, canonical[0])
    closure = frozenset(meta)
    return FlowClosure(params, window, closure, edges, meta, cycles)


@dataclass(frozen=True)
class CycleModeDecomposition:
    """Cycle data in the eigenbasis ``lambda_j = exp(2 pi i j / m)``.

    The coordinate at phase ``p`` is ``sum_j c_j lambda_j^p exp(lambda_j t)``.
    """

    cycle_length: int
    lambdas: np.ndarray
    coefficients: np.ndarray

    @classmethod
    def from_cycle_data(cls, values: Sequence[complex]) -> CycleModeDecomposition:
        m = len(values)
        lambdas = np.exp(2j * np.pi * np.arange(m) / m)
        # c_j = (1/m) sum_p u_p lambda_j^{-p}, i.e. a forward DFT
        coefficients = np.fft.fft(np.asarray(values, dtype=complex)) / m
        return cls(m, lambdas, coefficients)

    def phase_coefficients(self, phase: int) -> np.ndarray:
        return self.coefficients * self.lambdas**phase

    def value(self, phase: int, t: float, derivative: int = 0) -> complex:
        d = self.phase_coefficients(phase)
        return complex(np.sum(d * self.lambdas**derivative * np.exp(self.lambdas * t)))


def _check_initial(closure: FlowClosure, initial: SpectralState) -> None:
    if initial.params != closure.params:
        raise ValueError("initial data and closure use different parameters")
    missing = initial.support - closure.closure
    if missing:
        raise ValueError(f"initial data outside the closure: {sorted(missing)[:5]}")


def cycle_modes(closure: FlowClosure, initial: SpectralState) -> dict[int, CycleModeDecomposition]:
    return {
        cid: CycleModeDecomposition.from_cycle_data([initial[z] for z in nodes])
        for cid, nodes in closure.cycles.items()
    }


def solve_closed_form(
    closure: FlowClosure, initial: SpectralState, t: float
) -> SpectralState:
    """Exact solution on the closure via cycle modes and upstream polynomials."""
    _check_initial(closure, initial)
    if t == 0:
        return SpectralState(closure.params, dict(initial.amplitudes), initial.time)
    modes = cycle_modes(closure, initial)
    out = {}
    for n in closure.frequencies():
        if n not in closure.orbit_meta:
            raise ValueError(f"frequency {n} has no orbit metadata")
        out[n] = _coordinate(closure, initial, modes[closure.orbit_meta[n].cycle_id], n, t)
    return SpectralState(closure.params, out, initial.time + t)


def _coordinate(
    closure: FlowClosure,
    initial: SpectralState,
    modes: CycleModeDecomposition,
    n: int,
    t: float,
) -> complex:
    meta = closure.orbit_meta[n]
    if meta.ell == 0:
        return modes.value(meta.cycle_phase, t)
    ell = meta.ell
    d = modes.phase_coefficients(meta.cycle_phase)
    lam = modes.lambdas
    path = closure.path_to_cycle(n)
    total = complex(np.sum(d / lam**ell * np.exp(lam * t)))
    term = 1.0  # t^k / k!
    for k in range(ell):
        total += (initial[path[k]] - complex(np.sum(d / lam ** (ell - k)))) * term
        term *= t / (k + 1)
    return total


# -- numerical integration ---------------------------------------------------


def successor_index(closure: FlowClosure) -> tuple[list[int], np.ndarray]:
    freqs = closure.frequencies()
    pos = {n: i for i, n in enumerate(freqs)}
    return freqs, np.array([pos[closure.edges[n]] for n in freqs], dtype=np.int64)


def _rhs(u: np.ndarray, succ: np.ndarray) -> np.ndarray:
    """``u[succ]`` with ``succ == -1`` meaning no forcing (truncated chains)."""
    out = u[succ]
    out[succ < 0] = 0
    return out


def rk4_integrate(succ: np.ndarray, u0: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Classical RK4 for ``u' = u[succ]`` on ``[0, t]`` with ``ceil(t/dt)`` equal steps."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    u = np.array(u0, dtype=complex)
    if t == 0:
        return u
    steps = max(1, math.ceil(t / dt - 1e-12))
    h = t / steps
    for _ in range(steps):
        k1 = _rhs(u, succ)
        k2 = _rhs(u + 0.5 * h * k1, succ)
        k3 = _rhs(u + 0.5 * h * k2, succ)
        k4 = _rhs(u + h * k3, succ)
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def picard_integrate(
    succ: np.ndarray,
    u0: np.ndarray,
    t: float,
    subinterval: float = PICARD_SUBINTERVAL,
    tol: float = 1e-14,
    max_iter: int = 200,
) -> np.ndarray:
    """Iterate ``u -> u(t0) + int_{t0}^s C u`` to a fixed point on each subinterval.

    Iterates are polynomials in ``s - t0`` held as coefficient rows, so each
    integral is exact. ``subinterval`` must stay below 1/2, where the map is a
    contraction (``sqrt(2) * h < 1``).
    """
    if not 0 < subinterval < 0.5:
        raise ValueError("Picard subinterval must lie in (0, 1/2)")
    u = np.array(u0, dtype=complex)
    if t == 0:
        return u
    pieces = max(1, math.ceil(t / subinterval - 1e-12))
    h = t / pieces
    for _ in range(pieces):
        coeffs = [u.copy()]
        scale = max(1.0, float(np.max(np.abs(u))) if u.size else 1.0)
        for it in range(max_iter):
            # the next iterate differs from the current one only in a new top row
            new_row = _rhs(coeffs[-1], succ) / len(coeffs)
            coeffs.append(new_row)
            increment = float(np.max(np.abs(new_row))) * h ** (len(coeffs) - 1) if u.size else 0.0
            if increment <= tol * scale:
                break
        else:
            raise PicardNotConverged(f"no fixed point within {max_iter} iterations")
        powers = h ** np.arange(len(coeffs))
        u = np.tensordot(powers, np.array(coeffs), axes=1)
    return u


def solve_numerical(
    closure: FlowClosure,
    initial: SpectralState,
    t: float,
    scheme: Literal["picard", "rk4"] = "rk4",
    dt: float = 1e-3,
    picard_tol: float = 1e-14,
) -> SpectralState:
    """Integrate the closure system numerically.

    ``rk4`` steps with size at most ``dt``. ``picard`` uses subintervals of
    length ``min(dt, 0.4)``.
    """
    _check_initial(closure, initial)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    freqs, succ = successor_index(closure)
    u0 = np.array([initial[n] for n in freqs], dtype=complex)
    if scheme == "rk4":
        u = rk4_integrate(succ, u0, t, dt)
    elif scheme == "picard":
        u = picard_integrate(succ, u0, t, min(dt, PICARD_SUBINTERVAL), picard_tol)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return SpectralState(closure.params, dict(zip(freqs, u.tolist())), initial.time + t)


def taylor_tail(chain_data: Sequence[complex], t: float) -> np.ndarray:
    """Coordinates along a chain ``n_0 -> n_1 -> ...`` with no cycle.

    ``u_{n_j}(t) = sum_{k>=0} u_{n_{j+k}}(0) t^k / k!``, truncated where the
    data ends.
    """
    data = np.asarray(chain_data, dtype=complex)
    L = len(data)
    weights = np.empty(L)
    weights[0] = 1.0
    for k in range(1, L):
        weights[k] = weights[k - 1] * t / k
    return np.array([np.dot(data[j:], weights[: L - j]) for j in range(L)])


# -- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class GrowthRow:
    t: float
    windowed_norm: float
    growth_bound: float

    @property
    def ok(self) -> bool:
        return self.windowed_norm <= self.growth_bound * (1 + SOLVER_TOL)


@dataclass(frozen=True)
class FlowRun:
    """Solution snapshots plus the growth check at each time."""

    closure: FlowClosure
    states: tuple[SpectralState, ...]
    rows: tuple[GrowthRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


def growth_monitor(
    closure: FlowClosure,
    initial: SpectralState,
    t_grid: Iterable[float],
    scheme: Literal["closed", "picard", "rk4"] = "closed",
    dt: float = 1e-3,
) -> FlowRun:
    """Check ``|u(t)|_closure <= exp(sqrt(2) t) |u0|`` at each time.

    The norm over the closure is a lower bound on the full norm, so this is
    a necessary condition only.
    """
    norm0 = initial.norm()
    states, rows = [], []
    for t in t_grid:
        if t < 0:
            raise ValueError("times must be nonnegative")
        if scheme == "closed":
            state = solve_closed_form(closure, initial, t)
        else:
            state = solve_numerical(closure, initial, t, scheme, dt)
        row = GrowthRow(t, state.norm(closure.closure), math.exp(math.sqrt(2) * t) * norm0)
        if not row.ok:
            raise IdentityViolation(f"growth bound violated at t={t}", row)
        states.append(state)
        rows.append(row)
    return FlowRun(closure, tuple(states), tuple(rows))


def bessel_i0_series(x: float) -> float:
    """``I_0(x) = sum_j (x/2)^(2j) / (j!)^2``, summed until terms stop mattering."""
    q = (x / 2.0) ** 2
    term = total = 1.0
    j = 0
    while True:
        j += 1
        term *= q / (j * j)
        if total + term == total:
            return total
        total += term


@dataclass(frozen=True)
class ProbeRow:
    t: float
    norm_sq: float
    bessel_bound: float

    @property
    def ok(self) -> bool:
        return self.norm_sq <= self.bessel_bound


@dataclass(frozen=True)
class DeltaProbe:
    pivot: int
    window_max: int
    hits: Mapping[int, int]  # frequency k -> m_k with C^{m_k}(k) = pivot
    rows: tuple[ProbeRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def amplitude(self, k: int, t: float) -> float:
        m = self.hits.get(k)
        return 0.0 if m is None else t**m / math.factorial(m)


def hitting_times(
    params: CollatzParams, pivot: int, window_max: int, max_steps: int = 100_000
) -> dict[int, int]:
    """``{k: m_k}`` for ``k <= window_max`` whose orbit reaches ``pivot``."""
    rec = orbit(params, pivot, max_steps=max_steps)
    if rec.cycle_found and pivot in rec.cycle:
        raise ValueError(f"pivot {pivot} lies on a cycle; its coordinate is not polynomial")
    hits = {}
    for k in range(1, window_max + 1):
        x, steps = k, 0
        seen = set()
        while x != pivot and x not in seen and steps < max_steps:
            seen.add(x)
            x = apply(params, x)
            steps += 1
        if x == pivot:
            hits[k] = steps
    return hits


def delta_probe(
    params: CollatzParams = CollatzParams(3, 1),
    pivot: int = 5,
    window_max: int = 10_000,
    t_grid: Iterable[float] = (0.5, 1.0, 2.0),
) -> DeltaProbe:
    """Evolve ``delta_pivot``: ``u_k(t) = t^{m_k}/m_k!`` where ``C^{m_k}(k) = pivot``.

    The windowed ``|u(t)|^2`` is compared with ``I_0(2 sqrt(2) t)``, which
    bounds the full norm since depth ``j`` of the preimage tree has at most
    ``2^j`` nodes.
    """
    hits = hitting_times(params, pivot, window_max)
    rows = []
    for t in t_grid:
        norm_sq = math.fsum((t**m / math.factorial(m)) ** 2 for m in hits.values())
        row = ProbeRow(t, norm_sq, bessel_i0_series(2 * math.sqrt(2) * t))
        if not row.ok:
            raise IdentityViolation(f"Bessel bound violated at t={t}", row)
        rows.append(row)
    return DeltaProbe(pivot, window_max, hits, tuple(rows))
