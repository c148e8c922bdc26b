"""Deterministic CSV/JSON serialization of module reports.

JSON keys are sorted and integers outside the 53-bit safe range become
decimal strings, so output is byte-reproducible and lossless for any
consumer. Rationals are written ``"p/q"`` and complex numbers ``[re, im]``.
"""

from __future__ import annotations

import csv
import io
import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .coeffs import CoeffTable
from .core import CollatzParams
from .derivative import ClassCoefficients, DerivativeDecomposition

SAFE_INT = 2**53

COLUMNS = {
    "orbit": ("step", "value", "parity"),
    "parity": ("n", "parity"),
    "coeffs": ("residue", "a", "b", "alpha_exponent"),
    "energy": ("n", "k", "m", "s_k", "s_km", "energy", "pseudo_virial_num", "pseudo_virial_den"),
    "deriv": ("residue", "n_coeff_num", "free_coeff_num", "denominator"),
    "flow": ("t", "frequency", "re", "im", "windowed_norm", "growth_bound"),
    "verify": ("name", "status", "witness"),
}


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        obj = int(obj)
        return obj if -SAFE_INT < obj < SAFE_INT else str(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, CollatzParams):
        return {"alpha": obj.alpha, "beta": obj.beta}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        if all(type(v) is int for v in obj):
            # fast path for coefficient columns
            return [v if -SAFE_INT < v < SAFE_INT else str(v) for v in obj]
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "__dataclass_fields__"):
        return {name: to_jsonable(getattr(obj, name)) for name in obj.__dataclass_fields__}
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_json(payload: Any) -> bytes:
    """Compact, key-sorted JSON followed by a newline."""
    return (json.dumps(to_jsonable(payload), sort_keys=True, separators=(",", ":")) + "\n").encode()


def emit_csv(kind: str, rows: Iterable[Sequence[Any]]) -> bytes:
    """Rows of ints, floats and strings; floats use their shortest round-trip repr."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS[kind])
    writer.writerows(rows)
    return buf.getvalue().encode()


def json_cell(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True)


def write_output(data: bytes, path: str | os.PathLike) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# -- module payloads ---------------------------------------------------------


def coeff_payload(table: CoeffTable) -> dict:
    a, b = table.to_lists()
    return {"params": table.params, "k": table.k, "a": a, "b": b}


def coeff_rows(table: CoeffTable) -> list[tuple]:
    a, b = table.to_lists()
    exps = table.alpha_exponents()
    return [(i, a[i], b[i], exps[i]) for i in range(len(a))]


def deriv_payload(decomp: DerivativeDecomposition) -> dict:
    return {
        "params": decomp.params,
        "m": decomp.m,
        "denominator": decomp.denominator,
        "n_coeff_num": [c.n_coeff_numerator for c in decomp.per_class],
        "free_coeff_num": [c.free_coeff_numerator for c in decomp.per_class],
        "n_coeff_sum": decomp.n_coeff_sum,
        "free_coeff_sum": decomp.free_coeff_sum,
    }


def deriv_rows(decomp: DerivativeDecomposition) -> list[tuple]:
    return [
        (c.residue, c.n_coeff_numerator, c.free_coeff_numerator, decomp.denominator)
        for c in decomp.per_class
    ]


def _params(d: dict) -> CollatzParams:
    return CollatzParams(int(d["alpha"]), int(d["beta"]))


def load_coeff_table(data: bytes | str) -> CoeffTable:
    d = json.loads(data)
    a = [int(x) for x in d["a"]]
    b = [int(x) for x in d["b"]]
    big = any(abs(x) >= 2**62 for x in a + b)
    dtype = object if big else np.int64
    return CoeffTable(_params(d["params"]), int(d["k"]), np.array(a, dtype=dtype), np.array(b, dtype=dtype))


def load_deriv(data: bytes | str) -> DerivativeDecomposition:
    d = json.loads(data)
    n_num = [int(x) for x in d["n_coeff_num"]]
    free = [int(x) for x in d["free_coeff_num"]]
    return DerivativeDecomposition(
        _params(d["params"]),
        int(d["m"]),
        tuple(ClassCoefficients(r, n_num[r], free[r]) for r in range(len(n_num))),
        int(d["n_coeff_sum"]),
        int(d["free_coeff_sum"]),
    )
