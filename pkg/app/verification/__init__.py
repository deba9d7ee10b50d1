from app.verification.caputo import caputo_l1
from app.verification.distribution import ks_distribution_test, reference_cdf
from app.verification.residuals import fractional_residual, heat_residual


__all__ = [
    "caputo_l1",
    "fractional_residual",
    "heat_residual",
    "ks_distribution_test",
    "reference_cdf",
]
