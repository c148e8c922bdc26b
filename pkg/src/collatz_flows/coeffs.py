"""Residue-class affine decomposition of ``C^k``.

For ``n ≡ i (mod 2^k)`` one has ``2^k C^k(n) = a[i] n + b[i]`` with every
``a[i]`` a power of alpha. Tables are built level by level with the doubling
recurrence: a class ``j`` mod ``2^k`` splits into ``j`` and ``j + 2^k`` mod
``2^(k+1)``, and the parity of ``C^k`` on each half decides whether the next
step multiplies by alpha.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .core import CollatzParams, _INT64_SAFE, iterate, iterate_array
from .errors import BudgetExceeded, CheckResult, IdentityViolation

DEFAULT_MAX_K = 24


@dataclass(frozen=True, eq=False)
class CoeffTable:
    params: CollatzParams
    k: int
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.a)

    def row(self, residue: int) -> tuple[int, int]:
        return int(self.a[residue]), int(self.b[residue])

    def evaluate(self, n: int) -> int:
        """``C^k(n)`` for ``n >= 0`` read off the table."""
        a, b = self.row(n % (1 << self.k))
        value, rem = divmod(a * n + b, 1 << self.k)
        if rem:
            raise IdentityViolation(f"2^{self.k} does not divide a*n+b at n={n}", n)
        return value

    def alpha_exponents(self) -> list[int]:
        """Exponent ``e`` with ``a[i] = alpha**e`` for each residue."""
        alpha = self.params.alpha
        # alpha = 1 has only 1 = alpha^0
        powers = {alpha**e: e for e in range(self.k + 1)} if alpha > 1 else {1: 0}
        out = []
        for ai in self.a.tolist():
            e = powers.get(int(ai))
            if e is None:
                raise IdentityViolation(f"a-value {ai} is not a power of alpha up to alpha^{self.k}", int(ai))
            out.append(e)
        return out

    def to_lists(self) -> tuple[list[int], list[int]]:
        return [int(x) for x in self.a.tolist()], [int(x) for x in self.b.tolist()]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoeffTable):
            return NotImplemented
        return (
            self.params == other.params
            and self.k == other.k
            and self.to_lists() == other.to_lists()
        )


def _fits_int64(params: CollatzParams, k: int) -> bool:
    base = max(params.alpha, 2)
    return params.beta * (k + 1) * base ** (k + 1) < _INT64_SAFE


def coeff_tables(
    params: CollatzParams, k_max: int, max_k: int = DEFAULT_MAX_K
) -> list[CoeffTable]:
    """Tables for every level ``0..k_max`` (level 0 is ``a=[1], b=[0]``)."""
    if k_max < 0:
        raise ValueError(f"k must be nonnegative, got {k_max}")
    if k_max > max_k:
        raise BudgetExceeded(
            f"k={k_max} exceeds the table budget max_k={max_k} (2^k entries)"
        )
    alpha, beta = params.alpha, params.beta
    dtype = np.int64 if _fits_int64(params, k_max) else object
    a = np.ones(1, dtype=dtype)
    b = np.zeros(1, dtype=dtype)
    tables = [CoeffTable(params, 0, a, b)]
    for k in range(k_max):
        size = 1 << (k + 1)
        reps = np.arange(size, dtype=np.int64)
        reps[0] = size  # smallest positive representative of class 0
        odd = (iterate_array(params, reps, k) & 1) == 1
        a_par = np.concatenate([a, a])
        b_par = np.concatenate([b, b])
        a = np.where(odd, alpha * a_par, a_par).astype(dtype)
        b = np.where(odd, alpha * b_par + (beta << k), b_par).astype(dtype)
        tables.append(CoeffTable(params, k + 1, a, b))
    return tables


def build_coeff_table(
    params: CollatzParams, k: int, max_k: int = DEFAULT_MAX_K
) -> CoeffTable:
    """Build the ``2^k``-row table of ``(a, b)``; raises BudgetExceeded past ``max_k``."""
    return coeff_tables(params, k, max_k)[-1]


def expected_sum_a(params: CollatzParams, k: int) -> int:
    return (params.alpha + 1) ** k


def expected_sum_b(params: CollatzParams, k: int) -> int:
    alpha, beta = params.alpha, params.beta
    if k == 0:
        return 0
    if alpha == 3:
        return beta * k * (alpha + 1) ** (k - 1)
    num = (alpha + 1) ** k - 4**k
    q, r = divmod(num, alpha - 3)
    assert r == 0
    return beta * q


@dataclass(frozen=True)
class CoeffSums:
    sum_a: int
    sum_b: int


def coeff_sums(table: CoeffTable) -> CoeffSums:
    """Exact column sums, checked against their closed forms."""
    a, b = table.to_lists()
    sums = CoeffSums(sum(a), sum(b))
    want_a = expected_sum_a(table.params, table.k)
    want_b = expected_sum_b(table.params, table.k)
    if sums.sum_a != want_a:
        raise IdentityViolation(f"sum a = {sums.sum_a}, expected {want_a}", sums)
    if sums.sum_b != want_b:
        raise IdentityViolation(f"sum b = {sums.sum_b}, expected {want_b}", sums)
    return sums


def verify_mod_decomposition(
    table: CoeffTable,
    sample_count: int = 1000,
    seed: int = 0,
    exhaustive_k: int = 12,
) -> CheckResult:
    """Compare ``2^k C^k(n)`` against ``a n + b`` with ``C^k`` from direct iteration.

    Exhaustive over ``n in [1, 2^(k+2)]`` when ``k <= exhaustive_k``, plus
    ``sample_count`` random ``n`` up to 2^128 checked one at a time.
    """
    params, k = table.params, table.k
    mod = 1 << k
    checked = 0
    if k <= exhaustive_k:
        ns = np.arange(1, (1 << (k + 2)) + 1, dtype=np.int64)
        lhs = iterate_array(params, ns, k) * mod
        a = table.a[ns % mod]
        b = table.b[ns % mod]
        if a.dtype != object and int(np.max(a)) * int(ns[-1]) >= _INT64_SAFE:
            a, b = a.astype(object), b.astype(object)
        rhs = a * ns + b
        bad = np.nonzero(lhs != rhs)[0]
        checked += len(ns)
        if len(bad):
            n = int(ns[bad[0]])
            return CheckResult(False, checked, _witness(table, n))
    rng = random.Random(seed)
    for _ in range(sample_count):
        n = rng.randrange(1, 1 << 128)
        checked += 1
        ai, bi = table.row(n % mod)
        if mod * iterate(params, n, k) != ai * n + bi:
            return CheckResult(False, checked, _witness(table, n))
    return CheckResult(True, checked)


def _witness(table: CoeffTable, n: int) -> dict:
    ai, bi = table.row(n % (1 << table.k))
    return {
        "n": n,
        "lhs": (1 << table.k) * iterate(table.params, n, table.k),
        "rhs": ai * n + bi,
    }
