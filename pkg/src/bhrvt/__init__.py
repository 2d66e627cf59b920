"""Probability densities and moments of the Beverton-Holt model with random inputs."""

from .dist import (IndependentUniformJoint, ParamPoint, SupportBox, TruncatedGaussianJoint,
                   from_config, preset)
from .mc import McConfig
from .quad import ConvergenceError, IntegralResult, QuadratureConfig
from .rvt import (STEADY, DensityCurve, DensitySurface, pdf1_at, pdf1_curve, pdf2_at,
                  pdf2_surface, pdf_steady_at, pdf_steady_curve)
from .stats import (CovarianceSurface, MomentSeries, correlation_at, covariance_surface,
                    mean_var_at, moment_series, steady_moments)

__version__ = "0.1.0"
