from app.spectral.domain import as_points, eigenpairs, eigenvalues, mode_matrix, register_table
from app.spectral.initial import InitialCondition, builtin_initial_condition, coefficients, zero_initial_condition
from app.spectral.series import (
    coefficient_decay_check,
    fixed_truncation,
    heat_semigroup,
    modal_profile,
    modal_weights,
    normalize_grid,
    per_mode_higher_order_residual,
    solve_spectral,
)


__all__ = [
    "as_points",
    "eigenpairs",
    "eigenvalues",
    "mode_matrix",
    "register_table",
    "InitialCondition",
    "builtin_initial_condition",
    "coefficients",
    "zero_initial_condition",
    "coefficient_decay_check",
    "fixed_truncation",
    "heat_semigroup",
    "modal_profile",
    "modal_weights",
    "normalize_grid",
    "per_mode_higher_order_residual",
    "solve_spectral",
]
