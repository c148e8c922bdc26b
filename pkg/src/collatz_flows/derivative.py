"""Discrete time derivatives ``D_t^m = (C - I)^m`` along Collatz orbits.

On each residue class ``r`` mod ``2^m`` the m-th difference at ``x = C^k(n)``
is affine in ``x``; coefficients are kept as integer numerators over the
common denominator ``2^m``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .coeffs import DEFAULT_MAX_K, coeff_tables
from .core import CollatzParams, iterate
from .errors import CheckResult, IdentityViolation


def discrete_derivative_value(params: CollatzParams, n: int, k: int, m: int) -> int:
    """``sum_j binom(m, j) (-1)^j C^(m-j)(C^k(n))`` by direct iteration."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if m < 0 or k < 0:
        raise ValueError("k and m must be nonnegative")
    x = iterate(params, n, k)
    orbit = [x]
    for _ in range(m):
        orbit.append(iterate(params, orbit[-1], 1))
    return sum(comb(m, j) * (-1) ** j * orbit[m - j] for j in range(m + 1))


@dataclass(frozen=True)
class ClassCoefficients:
    residue: int
    n_coeff_numerator: int
    free_coeff_numerator: int


@dataclass(frozen=True)
class DerivativeDecomposition:
    params: CollatzParams
    m: int
    per_class: tuple[ClassCoefficients, ...]
    n_coeff_sum: int
    free_coeff_sum: int

    @property
    def denominator(self) -> int:
        return 1 << self.m

    def evaluate_scaled(self, x: int) -> int:
        """``2^m D_t^m`` at a point with value ``x >= 0``."""
        row = self.per_class[x % self.denominator]
        return row.n_coeff_numerator * x + row.free_coeff_numerator

    @property
    def normalized_sums(self) -> tuple[Fraction, Fraction]:
        """Aggregate sums divided by ``2^m``."""
        return (
            Fraction(self.n_coeff_sum, self.denominator),
            Fraction(self.free_coeff_sum, self.denominator),
        )


def expected_sums(params: CollatzParams, m: int) -> tuple[int, int]:
    """``((alpha-3)^m, beta (alpha-3)^(m-1))`` with ``0^0 = 1``."""
    d = params.alpha - 3
    return d**m, params.beta * d ** (m - 1)


def build_derivative_decomposition(
    params: CollatzParams, m: int, max_k: int = DEFAULT_MAX_K
) -> DerivativeDecomposition:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    tables = coeff_tables(params, m, max_k)
    size = 1 << m
    residues = np.arange(size, dtype=np.int64)
    n_num = [0] * size
    free_num = [0] * size
    for j in range(m + 1):
        level = m - j
        weight = comb(m, j) * (-2) ** j
        idx = residues % (1 << level)
        a = tables[level].a[idx].tolist()
        b = tables[level].b[idx].tolist()
        for r in range(size):
            n_num[r] += weight * int(a[r])
            free_num[r] += weight * int(b[r])
    decomp = DerivativeDecomposition(
        params,
        m,
        tuple(ClassCoefficients(r, n_num[r], free_num[r]) for r in range(size)),
        sum(n_num),
        sum(free_num),
    )
    want_n, want_free = expected_sums(params, m)
    if decomp.n_coeff_sum != want_n:
        raise IdentityViolation(f"n-coefficient sum {decomp.n_coeff_sum} != {want_n}", decomp.n_coeff_sum)
    if decomp.free_coeff_sum != want_free:
        raise IdentityViolation(f"free-coefficient sum {decomp.free_coeff_sum} != {want_free}", decomp.free_coeff_sum)
    return decomp


def verify_affine_representation(
    decomp: DerivativeDecomposition,
    sample_count: int = 1000,
    seed: int = 0,
    exhaustive: bool = False,
    k_max: int = 4,
) -> CheckResult:
    """Compare the class-wise affine form against direct iteration.

    With ``exhaustive`` every ``n in [1, 2^(m+2)]`` and ``k in [0, k_max]`` is
    checked; otherwise ``sample_count`` random pairs with ``n < 2^64``.
    """
    params, m = decomp.params, decomp.m
    if exhaustive:
        pairs = ((n, k) for n in range(1, (1 << (m + 2)) + 1) for k in range(k_max + 1))
    else:
        rng = random.Random(seed)
        pairs = ((rng.randrange(1, 1 << 64), rng.randrange(0, 32)) for _ in range(sample_count))
    checked = 0
    for n, k in pairs:
        checked += 1
        x = iterate(params, n, k)
        lhs = decomp.denominator * discrete_derivative_value(params, n, k, m)
        rhs = decomp.evaluate_scaled(x)
        if lhs != rhs:
            return CheckResult(False, checked, {"n": n, "k": k, "lhs": lhs, "rhs": rhs})
    return CheckResult(True, checked)
