"""Common enumerations used across the application"""
from enum import Enum


class DomainKind(str, Enum):
    """Kinds of bounded domains with enumerable Dirichlet eigenpairs"""

    INTERVAL = "interval"
    BOX = "box"
    TABLE = "table"

    def __str__(self) -> str:
        return self.value


class ClockVariant(str, Enum):
    """Random time changes applied to the killed Brownian motion

    - INVERSE_STABLE: hitting time E^beta(t) of a stable subordinator
    - ITERATED_BM: |I_k(t)|, nested absolute Brownian motions
    - TWO_SIDED_ITERATED: J_k(t), nested two-sided Brownian motions (signed)
    - ALPHA_STABLE: |Y(t)| for a symmetric alpha-stable process Y
    """

    INVERSE_STABLE = "inverse_stable"
    ITERATED_BM = "iterated_bm"
    TWO_SIDED_ITERATED = "two_sided_iterated"
    ALPHA_STABLE = "alpha_stable"

    def __str__(self) -> str:
        return self.value


class SolveMethod(str, Enum):
    """Solution routes"""

    SPECTRAL = "spectral"
    QUADRATURE = "quadrature"
    MC = "mc"

    def __str__(self) -> str:
        return self.value


class PdeTag(str, Enum):
    """Equations whose residuals can be checked"""

    FRACTIONAL = "fractional"
    HEAT = "heat"
    CAUCHY_CLOCK = "cauchy_clock"

    def __str__(self) -> str:
        return self.value


class InitialConditionName(str, Enum):
    """Built-in initial data

    - SINE: sin(pi x / M) on an interval (rejected on boxes)
    - PRODUCT_SINE: product of sin(pi x_i / L_i) over all coordinates
    - BUMP: C-infinity bump exp(-1/(x (M - x))) per coordinate, vanishing to all orders at the boundary
    - POLYNOMIAL: x (M - x) per coordinate
    """

    SINE = "sine"
    PRODUCT_SINE = "product-sine"
    BUMP = "bump"
    POLYNOMIAL = "polynomial"

    def __str__(self) -> str:
        return self.value


class CommandName(str, Enum):
    """CLI subcommands"""

    SOLVE = "solve"
    VERIFY = "verify"
    DIST_TEST = "dist-test"
    EIGEN = "eigen"

    def __str__(self) -> str:
        return self.value
