"""GARTFIMA long-memory time-series models.

Spectral density, autocovariance, simulation, log-periodogram NLS and Whittle
estimation, Monte Carlo estimator studies and one-step forecasting for the
GARTFIMA(p, d, lambda, u, q) process and its ARFIMA, ARTFIMA and GARMA special
cases.
"""

__version__ = "0.1.0"

from .acvf import (AcvfSequence, acvf_fft, artfima_acvf, full_acvf, gartfima_core_acvf,
                   sample_acvf, summability_diagnostic)
from .errors import DomainError, SpectralPoleError
from .estimate import (EstimationResult, FitOptions, fit, nls_fit, nls_objective,
                       select_orders, whittle_fit, whittle_objective)
from .forecast import ForecastReport, compare_models, one_step_forecasts, pi_weights
from .model import ModelFamily, ModelSpec, reduce, validate
from .montecarlo import MonteCarloSummary, box_stats, monte_carlo
from .numerics import CoeffSeq, gauss_2f1, gegenbauer_coeffs, gegenbauer_truncation
from .simulate import SimulationConfig, simulate
from .spectrum import harmonic_grid, periodogram, spectral_density

__all__ = [
    "AcvfSequence", "CoeffSeq", "DomainError", "EstimationResult", "FitOptions",
    "ForecastReport", "ModelFamily", "ModelSpec", "MonteCarloSummary", "SimulationConfig",
    "SpectralPoleError", "acvf_fft", "artfima_acvf", "box_stats", "compare_models", "fit",
    "full_acvf", "gartfima_core_acvf", "gauss_2f1", "gegenbauer_coeffs",
    "gegenbauer_truncation", "harmonic_grid", "monte_carlo", "nls_fit", "nls_objective",
    "one_step_forecasts", "periodogram", "pi_weights", "reduce", "sample_acvf",
    "select_orders", "simulate", "spectral_density", "summability_diagnostic", "validate",
    "whittle_fit", "whittle_objective", "__version__",
]
