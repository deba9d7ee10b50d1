from app.subordination.cauchy import cauchy_boundary_check, cauchy_clock_residual, cauchy_mode_identity_residual
from app.subordination.quadrature import (
    alpha_clock_mode_term,
    mode_laplace_identity,
    solve_alpha_clock_quadrature,
    solve_alpha_clock_spectral,
    solve_inverse_stable_quadrature,
)


__all__ = [
    "alpha_clock_mode_term",
    "mode_laplace_identity",
    "solve_alpha_clock_quadrature",
    "solve_alpha_clock_spectral",
    "solve_inverse_stable_quadrature",
    "cauchy_boundary_check",
    "cauchy_clock_residual",
    "cauchy_mode_identity_residual",
]
