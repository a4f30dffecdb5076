"""Saturated boundary control of linear hyperbolic systems."""

from ._hypiss import (
    BlowUpError,
    Certificate,
    ConfigError,
    DimensionError,
    IssCoefficients,
    Plant,
    Signal,
    SynthesisResult,
    WellPosednessConstants,
    check_wellposedness,
    closed_loop_matrix,
    deadzone,
    grid_search,
    iss_coefficients,
    iss_rhs,
    reference_gain,
    saturate,
    sector_value,
    simulate,
    synthesize,
    verify_analysis,
    wellposedness_certificate,
)

__all__ = [
    "BlowUpError",
    "Certificate",
    "ConfigError",
    "DimensionError",
    "IssCoefficients",
    "Plant",
    "Signal",
    "SynthesisResult",
    "WellPosednessConstants",
    "check_wellposedness",
    "closed_loop_matrix",
    "deadzone",
    "grid_search",
    "iss_coefficients",
    "iss_rhs",
    "reference_gain",
    "saturate",
    "sector_value",
    "simulate",
    "synthesize",
    "verify_analysis",
    "wellposedness_certificate",
]
