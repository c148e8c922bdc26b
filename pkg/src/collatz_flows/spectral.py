"""The Collatz operator on finitely supported sequences.

``(C u)_n = u_{C(n)}`` and its adjoint ``C* e_n = e_{C(n)}``. Only
frequencies ``n >= 1`` are stored; odd symmetry makes the negative half a
mirror image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .core import CollatzParams, apply

ALGEBRAIC_TOL = 1e-12


@dataclass(frozen=True)
class SpectralState:
    params: CollatzParams
    amplitudes: Mapping[int, complex] = field(default_factory=dict)
    time: float = 0.0

    def __post_init__(self) -> None:
        clean = {}
        for n, v in self.amplitudes.items():
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"frequencies must be positive integers, got {n!r}")
            if v != 0:
                clean[n] = complex(v)
        object.__setattr__(self, "amplitudes", dict(sorted(clean.items())))

    @classmethod
    def delta(cls, params: CollatzParams, n: int, value: complex = 1.0) -> SpectralState:
        return cls(params, {n: value})

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.amplitudes)

    def __getitem__(self, n: int) -> complex:
        return self.amplitudes.get(n, 0j)

    def norm_sq(self, window: Optional[Iterable[int]] = None) -> float:
        if window is None:
            return math.fsum(abs(v) ** 2 for v in self.amplitudes.values())
        return math.fsum(abs(self[n]) ** 2 for n in set(window))

    def norm(self, window: Optional[Iterable[int]] = None) -> float:
        return math.sqrt(self.norm_sq(window))

    def __add__(self, other: SpectralState) -> SpectralState:
        out = dict(self.amplitudes)
        for n, v in other.amplitudes.items():
            out[n] = out.get(n, 0j) + v
        return SpectralState(self.params, out, self.time)

    def __sub__(self, other: SpectralState) -> SpectralState:
        return self + other.scale(-1)

    def scale(self, c: complex) -> SpectralState:
        return SpectralState(self.params, {n: c * v for n, v in self.amplitudes.items()}, self.time)


def inner(u: SpectralState, v: SpectralState) -> complex:
    """``<u, v> = sum_n u_n conj(v_n)``."""
    return sum((u[n] * v[n].conjugate() for n in u.support & v.support), 0j)


def preimages(params: CollatzParams, m: int) -> list[int]:
    """All ``n >= 1`` with ``C(n) = m``: always ``2m``, plus one odd ``n`` sometimes."""
    out = [2 * m]
    num = 2 * m - params.beta
    if num > 0 and num % params.alpha == 0:
        out.append(num // params.alpha)
    return out


def doubles(params: CollatzParams, m: int) -> bool:
    """True when ``m`` has two positive preimages (an odd one besides ``2m``)."""
    return len(preimages(params, m)) == 2


def apply_operator(state: SpectralState) -> SpectralState:
    params = state.params
    out = {}
    for m, v in state.amplitudes.items():
        for n in preimages(params, m):
            out[n] = v
    return SpectralState(params, out, state.time)


def apply_adjoint(state: SpectralState) -> SpectralState:
    params = state.params
    out: dict[int, complex] = {}
    for n, v in state.amplitudes.items():
        f = apply(params, n)
        out[f] = out.get(f, 0j) + v
    return SpectralState(params, out, state.time)


def adjoint_kernel_basis(params: CollatzParams, n_max: int) -> list[SpectralState]:
    """``e_n - e_{alpha n + beta}`` for odd ``n <= n_max``."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return [
        SpectralState(params, {n: 1.0, params.alpha * n + params.beta: -1.0})
        for n in range(1, n_max + 1, 2)
    ]


@dataclass(frozen=True)
class NormCertificate:
    norm: float
    image_norm: float
    support_set: str  # "S", "T", "mixed" or "empty"
    sandwich_ok: bool
    equality_ok: Optional[bool]

    @property
    def ok(self) -> bool:
        return self.sandwich_ok and self.equality_ok is not False


def support_set(state: SpectralState) -> str:
    if not state.amplitudes:
        return "empty"
    kinds = {doubles(state.params, m) for m in state.amplitudes}
    if kinds == {False}:
        return "S"
    if kinds == {True}:
        return "T"
    return "mixed"


def norm_certificates(
    params: CollatzParams, test_states: Iterable[SpectralState], tol: float = ALGEBRAIC_TOL
) -> list[NormCertificate]:
    """Check ``|u| <= |Cu| <= sqrt(2)|u|`` and the equality cases.

    States supported where no frequency doubles must be isometric; states
    supported only on doubling frequencies must scale by exactly ``sqrt(2)``.
    """
    certs = []
    for u in test_states:
        if u.params != params:
            raise ValueError("state params differ from certificate params")
        norm = u.norm()
        image = apply_operator(u).norm()
        slack = tol * max(1.0, norm)
        sandwich = norm - slack <= image <= math.sqrt(2) * norm + slack
        kind = support_set(u)
        if kind == "S":
            equality = abs(image - norm) <= slack
        elif kind == "T":
            equality = abs(image - math.sqrt(2) * norm) <= slack
        elif kind == "empty":
            equality = image == 0.0
        else:
            equality = None
        certs.append(NormCertificate(norm, image, kind, sandwich, equality))
    return certs
