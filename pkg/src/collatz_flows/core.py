"""Exact integer dynamics of the generalized accelerated Collatz map.

``C(n) = n/2`` for even ``n`` and ``(alpha*n + beta)/2`` for odd ``n``, extended
to all of Z by odd symmetry. All arithmetic uses Python integers, so orbits of
any size are exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "CollatzParams",
    "InvalidParamsError",
    "Termination",
    "OrbitRecord",
    "ParityVector",
    "BijectionResult",
    "REFERENCE_PAIRS",
    "apply",
    "iterate",
    "orbit",
    "parity_vector",
    "parity_bijection_check",
    "iterate_array",
    "parity_codes",
    "step_bound",
]

_INT64_SAFE = 2**62


class InvalidParamsError(ValueError):
    """Raised when (alpha, beta) do not define a valid map."""


@dataclass(frozen=True)
class CollatzParams:
    alpha: int
    beta: int

    def __post_init__(self) -> None:
        a, b = self.alpha, self.beta
        if isinstance(a, bool) or not isinstance(a, int):
            raise InvalidParamsError(f"alpha must be an integer, got {a!r}")
        if isinstance(b, bool) or not isinstance(b, int):
            raise InvalidParamsError(f"beta must be an integer, got {b!r}")
        if a < 1:
            raise InvalidParamsError(f"alpha must be positive, got {a}")
        if b < 1:
            raise InvalidParamsError(f"beta must be positive, got {b}")
        if a % 2 == 0:
            raise InvalidParamsError(f"alpha must be odd, got {a}")
        if b % 2 == 0:
            raise InvalidParamsError(f"beta must be odd, got {b}")
        if math.gcd(a, b) != 1:
            raise InvalidParamsError(
                f"alpha and beta must be coprime, got gcd({a}, {b}) = {math.gcd(a, b)}"
            )

    def __str__(self) -> str:
        return f"C_{{{self.alpha},{self.beta}}}"


#: The (alpha, beta) grid used by the identity sweeps.
REFERENCE_PAIRS: tuple[CollatzParams, ...] = tuple(
    CollatzParams(a, b) for a, b in [(1, 1), (3, 1), (5, 1), (3, 5), (7, 3)]
)


def apply(params: CollatzParams, n: int) -> int:
    """One step of the map, with ``C(-n) = -C(n)`` and ``C(0) = 0``."""
    if n < 0:
        return -apply(params, -n)
    if n & 1:
        return (params.alpha * n + params.beta) >> 1
    return n >> 1


def iterate(params: CollatzParams, n: int, k: int) -> int:
    """Return ``C^k(n)``."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if n < 0:
        return -iterate(params, -n, k)
    a, b = params.alpha, params.beta
    for _ in range(k):
        n = (a * n + b) >> 1 if n & 1 else n >> 1
    return n


class Termination(str, enum.Enum):
    CYCLE_FOUND = "cycle_found"
    STEP_BUDGET_EXHAUSTED = "step_budget_exhausted"
    VALUE_BUDGET_EXHAUSTED = "value_budget_exhausted"


@dataclass(frozen=True)
class OrbitRecord:
    """A forward orbit ``values[j] = C^j(start)``.

    When a cycle is found the stored values stop at the first repetition, so
    ``values[cycle_entry_index + cycle_length] == values[cycle_entry_index]``.
    """

    start: int
    values: tuple[int, ...]
    cycle_entry_index: Optional[int]
    cycle_length: Optional[int]
    terminated_by: Termination

    @property
    def cycle_found(self) -> bool:
        return self.terminated_by is Termination.CYCLE_FOUND

    @property
    def cycle(self) -> tuple[int, ...]:
        if not self.cycle_found:
            return ()
        mu, lam = self.cycle_entry_index, self.cycle_length
        return self.values[mu : mu + lam]


def orbit(
    params: CollatzParams,
    n: int,
    max_steps: int = 10_000,
    max_value: Optional[int] = None,
) -> OrbitRecord:
    """Iterate from ``n`` until a cycle closes or a budget runs out.

    Cycle detection is Brent's power-of-two scheme; every hare position is
    recorded, so the entry index is read off the stored prefix afterwards.
    ``max_value`` bounds ``|C^j(n)|``; ``None`` means ``2**256 * max(|n|, 1)``.
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    if max_value is None:
        max_value = max(abs(n), 1) << 256
    if max_value < abs(n):
        raise ValueError(f"max_value {max_value} is below |n| = {abs(n)}")

    values = [n]
    power = lam = 1
    tortoise = n
    hare = n
    steps = 0
    while True:
        if steps >= max_steps:
            return OrbitRecord(n, tuple(values), None, None, Termination.STEP_BUDGET_EXHAUSTED)
        hare = apply(params, hare)
        steps += 1
        values.append(hare)
        if abs(hare) > max_value:
            return OrbitRecord(n, tuple(values), None, None, Termination.VALUE_BUDGET_EXHAUSTED)
        if hare == tortoise:
            break
        if power == lam:
            tortoise = hare
            power <<= 1
            lam = 0
        lam += 1

    # tortoise sits inside the cycle, so values already covers index mu + lam
    mu = next(i for i in range(len(values) - lam) if values[i] == values[i + lam])
    return OrbitRecord(
        n, tuple(values[: mu + lam + 1]), mu, lam, Termination.CYCLE_FOUND
    )


@dataclass(frozen=True)
class ParityVector:
    bits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.bits)

    def as_int(self) -> int:
        """Pack the bits little-endian: bit ``j`` is ``C^j(n) mod 2``."""
        return sum(bit << j for j, bit in enumerate(self.bits))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.bits)) + ")"


def parity_vector(params: CollatzParams, n: int, k: int) -> ParityVector:
    if n < 1:
        raise ValueError(f"parity vectors are defined for n >= 1, got {n}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    bits = []
    a, b = params.alpha, params.beta
    for _ in range(k):
        bit = n & 1
        bits.append(bit)
        n = (a * n + b) >> 1 if bit else n >> 1
    return ParityVector(tuple(bits))


@dataclass(frozen=True)
class BijectionResult:
    ok: bool
    k: int
    witness: Optional[tuple[int, int]] = None

    def __bool__(self) -> bool:
        return self.ok


def parity_bijection_check(params: CollatzParams, k: int) -> BijectionResult:
    """Check that ``n -> P_k(n)`` is injective (hence bijective) on ``[1, 2^k]``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ns = np.arange(1, 2**k + 1, dtype=np.int64)
    codes = parity_codes(params, ns, k)
    first_seen: dict[int, int] = {}
    for n, code in zip(ns.tolist(), codes.tolist()):
        prev = first_seen.setdefault(code, n)
        if prev != n:
            return BijectionResult(False, k, (prev, n))
    return BijectionResult(True, k)


def step_bound(params: CollatzParams, x_max: int, k: int) -> int:
    """Upper bound on ``|C^j(x)|`` for ``|x| <= x_max`` and ``j <= k``."""
    bound = x_max
    for _ in range(k):
        bound = max(bound, (params.alpha * bound + params.beta) // 2 + 1)
    return bound


def iterate_array(params: CollatzParams, xs: np.ndarray, k: int) -> np.ndarray:
    """Vectorized ``C^k`` over nonnegative integers, exact.

    Uses int64 when :func:`step_bound` proves no overflow, otherwise an object
    array of Python ints.
    """
    xs = np.asarray(xs)
    x_max = int(xs.max()) if xs.size else 0
    if xs.size and int(xs.min()) < 0:
        raise ValueError("iterate_array expects nonnegative integers")
    if step_bound(params, x_max, k) * max(params.alpha, 2) < _INT64_SAFE:
        out = xs.astype(np.int64, copy=True)
    else:
        out = np.array([int(x) for x in xs.ravel()], dtype=object).reshape(xs.shape)
    a, b = params.alpha, params.beta
    for _ in range(k):
        odd = (out & 1) == 1
        out = np.where(odd, (a * out + b) // 2, out // 2)
    return out


def parity_codes(params: CollatzParams, xs: np.ndarray, k: int) -> np.ndarray:
    """Little-endian packed parity vectors of length ``k`` for each entry of ``xs``."""
    xs = np.asarray(xs)
    if step_bound(params, int(xs.max()) if xs.size else 0, k) * max(params.alpha, 2) < _INT64_SAFE:
        cur = xs.astype(np.int64, copy=True)
    else:
        cur = np.array([int(x) for x in xs.ravel()], dtype=object).reshape(xs.shape)
    codes = np.zeros(xs.shape, dtype=object if k > 62 else np.int64)
    a, b = params.alpha, params.beta
    for j in range(k):
        odd = (cur & 1) == 1
        codes = codes + (odd.astype(np.int64) << j if k <= 62 else odd.astype(object) * (1 << j))
        cur = np.where(odd, (a * cur + b) // 2, cur // 2)
    return codes
