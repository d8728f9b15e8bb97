"""MQ NMR coherence dynamics of N equivalent spins with uniform dipolar coupling."""

from ._core import (
    ContractViolation,
    FitError,
    NumericalError,
    ParseError,
    SpinSystem,
    dense_spectrum,
    evolve,
    fit_profile,
    five_spin_closed_form,
    multiplicity_log,
    normalization_residual,
    profile_model,
    read_profile,
    sector_eigenvalues,
    sectors,
    short_time_check,
    time_average,
    verify_dimension_identity,
)

__version__ = "0.1.0"
