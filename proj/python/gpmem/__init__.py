"""Memory-kernel heat equation toolkit (C++ core)."""

from ._core import (
    GpmemError,
    Kernel,
    finite_speed_check,
    inverse_laplace,
    modal_poles,
    modal_theta_residue,
    modal_theta_talbot,
    omega,
    recover_K_semiaxis,
    recover_from_finite_data,
    recover_omega_interval,
    response_interval,
    response_semiaxis,
    run_config,
    solve_time_domain,
    synthetic_response,
    theta_semiaxis,
    uniqueness,
    validate_K0,
)

__version__ = "0.1.0"
