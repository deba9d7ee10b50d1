from app.specfun.mittag_leffler import mittag_leffler, mittag_leffler_series_mp, mode_profile
from app.specfun.stable import (
    alpha_stable_abs_median,
    alpha_stable_cdf_1d,
    alpha_stable_density_1d,
    inverse_stable_cdf,
    inverse_stable_density,
    inverse_stable_median,
    iterated_bm_density,
    kanter_a,
    stable_cdf,
    stable_density,
    stable_sf,
)


__all__ = [
    "mittag_leffler",
    "mittag_leffler_series_mp",
    "mode_profile",
    "stable_density",
    "stable_cdf",
    "stable_sf",
    "kanter_a",
    "inverse_stable_density",
    "inverse_stable_cdf",
    "inverse_stable_median",
    "alpha_stable_density_1d",
    "alpha_stable_cdf_1d",
    "alpha_stable_abs_median",
    "iterated_bm_density",
]
