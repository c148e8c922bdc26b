"""Exact dynamics, energy identities and spectral flows of generalized Collatz maps."""

__version__ = "0.1.0"

from .coeffs import CoeffTable, build_coeff_table, coeff_sums, coeff_tables, verify_mod_decomposition
from .core import (
    REFERENCE_PAIRS,
    CollatzParams,
    InvalidParamsError,
    OrbitRecord,
    ParityVector,
    Termination,
    apply,
    iterate,
    orbit,
    parity_bijection_check,
    parity_vector,
)
from .derivative import (
    DerivativeDecomposition,
    build_derivative_decomposition,
    discrete_derivative_value,
    verify_affine_representation,
)
from .energy import EnergySums, partial_sums, pseudo_virial, ratio_report
from .errors import BudgetExceeded, CheckResult, IdentityViolation
from .flow import (
    FlowClosure,
    build_flow_closure,
    delta_probe,
    growth_monitor,
    solve_closed_form,
    solve_numerical,
)
from .spectral import SpectralState, adjoint_kernel_basis, apply_adjoint, apply_operator, norm_certificates

__all__ = [
    "REFERENCE_PAIRS",
    "BudgetExceeded",
    "CheckResult",
    "CoeffTable",
    "CollatzParams",
    "DerivativeDecomposition",
    "EnergySums",
    "FlowClosure",
    "IdentityViolation",
    "InvalidParamsError",
    "OrbitRecord",
    "ParityVector",
    "SpectralState",
    "Termination",
    "adjoint_kernel_basis",
    "apply",
    "apply_adjoint",
    "apply_operator",
    "build_coeff_table",
    "build_derivative_decomposition",
    "build_flow_closure",
    "coeff_sums",
    "coeff_tables",
    "delta_probe",
    "discrete_derivative_value",
    "growth_monitor",
    "iterate",
    "norm_certificates",
    "orbit",
    "parity_bijection_check",
    "parity_vector",
    "partial_sums",
    "pseudo_virial",
    "ratio_report",
    "solve_closed_form",
    "solve_numerical",
    "verify_affine_representation",
    "verify_mod_decomposition",
]
