"""Coupled beam-string simulation and decay-certificate toolkit."""

from ._core import (
    PhysicalParams,
    __version__,
    certify,
    certify_scenario,
    energy0,
    epsilon0,
    km,
    lifting_norm_sq,
    lifting_operator_norm,
    lifting_residuals,
    scenario_params,
    simulate,
    structural_conditions,
    validate,
    verify,
)

__all__ = [
    "PhysicalParams",
    "__version__",
    "certify",
    "certify_scenario",
    "energy0",
    "epsilon0",
    "km",
    "lifting_norm_sq",
    "lifting_operator_norm",
    "lifting_residuals",
    "scenario_params",
    "simulate",
    "structural_conditions",
    "validate",
    "verify",
]
