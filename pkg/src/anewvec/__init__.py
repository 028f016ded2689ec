"""Numerical companions for archimedean analytic newvectors.

Gamma factors, Whittaker functions, M-series, the Whittaker-Plancherel
transform, congruence-set volumes, the n = 1 newvector pipeline and the
p-adic Shintani computation, plus a batch runner (``python -m anewvec``).
"""

__version__ = "0.1.0"

from .errors import (CalibrationError, ContourTailError, DegenerateFitError, PoleError,
                     RegimeError, TruncationError)
from .gamma_factors import (LanglandsParams, L_factor, L_reg, analytic_conductor, c_func,
                            conductor_tensor_bound, gamma_factor, gamma_R, gamma_R_residue,
                            rs_params, theta, theta_tuple)
from .numerics import BumpFunction, VerticalContour, bessel_K, contour_integral, log_gamma, \
    mellin_bump

__all__ = [
    "__version__",
    "BumpFunction", "CalibrationError", "ContourTailError", "DegenerateFitError",
    "L_factor", "L_reg", "LanglandsParams", "PoleError", "RegimeError", "TruncationError",
    "VerticalContour", "analytic_conductor", "bessel_K", "c_func", "conductor_tensor_bound",
    "contour_integral", "gamma_R", "gamma_R_residue", "gamma_factor", "log_gamma",
    "mellin_bump", "rs_params", "theta", "theta_tuple",
]
