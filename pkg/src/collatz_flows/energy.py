"""Block energy identities of ``C^k`` and the bounds derived from them.

Throughout, ``s_k(n) = sum_{j<2^k} C^k(n+j)`` and ``s_{k,m}(n)`` is the same
block shifted by ``m 2^k``. The block difference ``s_{k,1} - s_k`` equals
``(1+alpha)^k`` for every ``n``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import CollatzParams, _INT64_SAFE, iterate, iterate_array, step_bound
from .errors import CheckResult, IdentityViolation


def block_sum(params: CollatzParams, n: int, k: int) -> int:
    """``s_k(n)`` by direct iteration."""
    return sum(iterate(params, n + j, k) for j in range(1 << k))


def energy_sum(params: CollatzParams, n: int, k: int) -> int:
    """``sum_{j<2^k} (C^k(n+j+2^k) - C^k(n+j))``, iterated directly."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    size = 1 << k
    return sum(
        iterate(params, n + j + size, k) - iterate(params, n + j, k) for j in range(size)
    )


def lower_bound(params: CollatzParams, n: int, k: int) -> Fraction:
    """``n + ((1+alpha)^k - 1) / (2 alpha)``, a lower bound on ``s_k(n)``."""
    alpha = params.alpha
    return n + Fraction((1 + alpha) ** k - 1, 2 * alpha)


def upper_bound(params: CollatzParams, n: int, k: int) -> Fraction:
    """Upper bound on ``s_k(n)`` from ``C(x) <= (alpha x + beta)/2``.

    ``alpha - 2`` is odd, so it never vanishes; for alpha = 1 the ratio
    ``beta/(alpha-2)`` is ``-beta``.
    """
    alpha, beta = params.alpha, params.beta
    shift = Fraction(beta, alpha - 2)
    return (
        (n - Fraction(alpha, 2) + shift) * alpha**k
        + Fraction(alpha, 2) * (1 + alpha) ** k
        - shift * 2**k
    )


@dataclass(frozen=True)
class EnergySums:
    params: CollatzParams
    n: int
    k: int
    m: int
    s_k: int
    s_km: int

    @property
    def energy(self) -> int:
        """``s_{k,m} - s_k``; equals ``m (1+alpha)^k``."""
        return self.s_km - self.s_k


def partial_sums(params: CollatzParams, n: int, k: int, m: int = 1) -> EnergySums:
    """Compute ``s_k`` and ``s_{k,m}`` directly and assert the block invariants."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if k < 0 or m < 0:
        raise ValueError("k and m must be nonnegative")
    sums = EnergySums(
        params, n, k, m, block_sum(params, n, k), block_sum(params, n + m * (1 << k), k)
    )
    _check_sums(sums)
    return sums


def _check_sums(sums: EnergySums) -> None:
    params, n, k, m = sums.params, sums.n, sums.k, sums.m
    want = m * (1 + params.alpha) ** k
    if sums.energy != want:
        raise IdentityViolation(f"s_km - s_k = {sums.energy}, expected {want}", sums)
    if sums.s_k < lower_bound(params, n, k):
        raise IdentityViolation("s_k below its lower bound", sums)
    if sums.s_k > upper_bound(params, n, k):
        raise IdentityViolation("s_k above its upper bound", sums)


def pseudo_virial(params: CollatzParams, n: int, k: int) -> Fraction:
    """Average slope quotient over one block; equals ``((1+alpha)/4)^k``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    size = 1 << k
    total = sum(iterate(params, j + size, k) - iterate(params, j, k) for j in range(n, n + size))
    return Fraction(total, 4**k)


@dataclass(frozen=True)
class RatioRow:
    k: int
    ratio: Fraction
    lower: Fraction
    upper: Fraction

    @property
    def bracketed(self) -> bool:
        return self.lower <= self.ratio <= self.upper


def ratio_report(
    params: CollatzParams, n: int, m: int, k_max: int
) -> list[RatioRow]:
    """``s_{k,m}/s_k`` for ``k = 1..k_max`` with its finite-k bracket.

    The bracket is ``1 + m(1+alpha)^k / U`` below and ``1 + m(1+alpha)^k / L``
    above, with ``L <= s_k <= U`` from :func:`lower_bound`/:func:`upper_bound`.
    """
    rows = []
    for k in range(1, k_max + 1):
        sums = partial_sums(params, n, k, m)
        growth = m * (1 + params.alpha) ** k
        row = RatioRow(
            k,
            Fraction(sums.s_km, sums.s_k),
            1 + growth / upper_bound(params, n, k),
            1 + growth / lower_bound(params, n, k),
        )
        if not row.bracketed:
            raise IdentityViolation("ratio escapes its bracket", row)
        rows.append(row)
    return rows


# -- vectorized sweeps -------------------------------------------------------


class BlockSums:
    """Prefix sums of ``C^k`` over ``[1, x_max]`` for fast block sums."""

    def __init__(self, params: CollatzParams, k: int, x_max: int) -> None:
        self.params, self.k, self.x_max = params, k, x_max
        xs = np.arange(1, x_max + 1, dtype=np.int64)
        vals = iterate_array(params, xs, k)
        if vals.dtype != object and step_bound(params, x_max, k) * x_max >= _INT64_SAFE:
            vals = vals.astype(object)
        self.prefix = np.concatenate([np.zeros(1, dtype=vals.dtype), np.cumsum(vals)])

    def s(self, ns: np.ndarray, shift: int = 0) -> np.ndarray:
        """``s_{k,shift}(n)`` for every ``n`` in ``ns``."""
        start = ns + shift * (1 << self.k)
        stop = start + (1 << self.k) - 1
        if int(stop.max()) > self.x_max:
            raise ValueError("block extends beyond the precomputed range")
        return self.prefix[stop] - self.prefix[start - 1]


def _grid(
    n_range: tuple[int, int], k_range: Iterable[int]
) -> tuple[np.ndarray, list[int]]:
    n0, n1 = n_range
    if n0 < 1 or n1 < n0:
        raise ValueError(f"bad n range {n_range}")
    return np.arange(n0, n1 + 1, dtype=np.int64), list(k_range)


def energy_sweep(
    params: CollatzParams, n_range: tuple[int, int], k_range: Iterable[int]
) -> CheckResult:
    """Energy identity for every ``(n, k)`` on the grid, exact."""
    ns, ks = _grid(n_range, k_range)
    checked = 0
    for k in ks:
        table = BlockSums(params, k, int(ns[-1]) + 2 * (1 << k))
        energy = table.s(ns, 1) - table.s(ns, 0)
        want = (1 + params.alpha) ** k
        bad = np.nonzero(energy != want)[0]
        checked += len(ns)
        if len(bad):
            n = int(ns[bad[0]])
            return CheckResult(False, checked, {"n": n, "k": k, "energy": int(energy[bad[0]]), "expected": want})
    return CheckResult(True, checked)


def shift_sweep(
    params: CollatzParams, n_range: tuple[int, int], k_range: Iterable[int], m_max: int
) -> CheckResult:
    """``s_{k,m} - s_k = m (1+alpha)^k`` for ``m in [0, m_max]``."""
    ns, ks = _grid(n_range, k_range)
    checked = 0
    for k in ks:
        table = BlockSums(params, k, int(ns[-1]) + (m_max + 1) * (1 << k))
        base = table.s(ns, 0)
        unit = (1 + params.alpha) ** k
        for m in range(m_max + 1):
            diff = table.s(ns, m) - base
            bad = np.nonzero(diff != m * unit)[0]
            checked += len(ns)
            if len(bad):
                n = int(ns[bad[0]])
                return CheckResult(False, checked, {"n": n, "k": k, "m": m})
    return CheckResult(True, checked)


def bracket_sweep(
    params: CollatzParams, n_range: tuple[int, int], k_range: Iterable[int]
) -> CheckResult:
    """Both rational bounds on ``s_k(n)`` over the grid.

    Each bound is affine in ``n``; clearing its denominator turns the check
    into an integer comparison.
    """
    ns, ks = _grid(n_range, k_range)
    checked = 0
    for k in ks:
        table = BlockSums(params, k, int(ns[-1]) + (1 << k))
        sk = table.s(ns, 0).tolist()
        for name, bound in (("lower", lower_bound), ("upper", upper_bound)):
            b0 = bound(params, 0, k)
            slope = bound(params, 1, k) - b0
            den = math.lcm(b0.denominator, slope.denominator)
            c0, c1 = int(b0 * den), int(slope * den)
            for n, s in zip(ns.tolist(), sk):
                lhs, rhs = int(s) * den, c0 + c1 * n
                if (name == "lower" and lhs < rhs) or (name == "upper" and lhs > rhs):
                    return CheckResult(False, checked, {"n": n, "k": k, "bound": name, "s_k": int(s)})
            checked += len(sk)
    return CheckResult(True, checked)


def step_bounds_check(
    params: CollatzParams, samples: int = 100_000, seed: int = 0, x_max: int = 1 << 40
) -> CheckResult:
    """Pointwise step bounds ``C^k(n)/2 <= C^{k+1}(n) <= (alpha C^k(n) + beta)/2``.

    Sampled over random ``(n, k)``; compared after doubling, so exact.
    """
    rng = random.Random(seed)
    a, b = params.alpha, params.beta
    for i in range(samples):
        n = rng.randrange(1, x_max)
        x = iterate(params, n, rng.randrange(0, 16))
        nxt = iterate(params, x, 1)
        if not (x <= 2 * nxt <= a * x + b):
            return CheckResult(False, i + 1, {"n": n, "x": x, "C(x)": nxt})
    return CheckResult(True, samples)


def pseudo_virial_sweep(
    params: CollatzParams, n_range: tuple[int, int], k_range: Iterable[int]
) -> CheckResult:
    """Pseudo-virial equals ``((1+alpha)/4)^k`` at every grid point."""
    ns, ks = _grid(n_range, k_range)
    checked = 0
    for k in ks:
        table = BlockSums(params, k, int(ns[-1]) + 2 * (1 << k))
        energy = (table.s(ns, 1) - table.s(ns, 0)).tolist()
        want = Fraction(1 + params.alpha, 4) ** k
        for n, e in zip(ns.tolist(), energy):
            if Fraction(int(e), 4**k) != want:
                return CheckResult(False, checked, {"n": n, "k": k, "expected": str(want)})
        checked += len(energy)
    return CheckResult(True, checked)


def energy_rows(
    params: CollatzParams, n_range: tuple[int, int], k: int, m: int = 1
) -> list[tuple[EnergySums, Fraction]]:
    """``(EnergySums, pseudo-virial)`` for each ``n`` in the range, invariants asserted."""
    ns, _ = _grid(n_range, [k])
    table = BlockSums(params, k, int(ns[-1]) + (max(m, 1) + 1) * (1 << k))
    base = table.s(ns, 0).tolist()
    shifted = table.s(ns, m).tolist()
    unit = table.s(ns, 1).tolist()
    out = []
    for n, s0, sm, s1 in zip(ns.tolist(), base, shifted, unit):
        sums = EnergySums(params, n, k, m, int(s0), int(sm))
        _check_sums(sums)
        virial = Fraction(int(s1) - int(s0), 4**k)
        if virial != Fraction(1 + params.alpha, 4) ** k:
            raise IdentityViolation("pseudo-virial mismatch", sums)
        out.append((sums, virial))
    return out
