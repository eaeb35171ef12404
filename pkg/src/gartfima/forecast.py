"""AR(inf) weights, one-step forecasts and RMSE model comparison."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import DomainError
from .estimate import EstimationResult, FitOptions, fit
from .model import ModelFamily, ModelSpec, polynomial_roots_outside
from .montecarlo import worker_count
from .numerics import CoeffSeq, ar_polynomial, gegenbauer_coeffs, ma_polynomial

__all__ = [
    "ForecastReport",
    "ComparisonRow",
    "pi_weights",
    "one_step_forecasts",
    "compare_models",
    "split_index",
]

MAX_PI_LEN = 1000


@dataclass(frozen=True)
class ForecastReport:
    """One-step-ahead forecasts over the test segment.

    ``predictions`` and ``actual`` are on the original scale (the train mean
    is added back).
    """

    split_index: int
    actual: np.ndarray
    predictions: np.ndarray
    mse: float
    rmse: float
    residual_mean: float
    residual_variance: float
    train_mean: float

    @property
    def residuals(self) -> np.ndarray:
        return self.actual - self.predictions

    def to_dict(self) -> dict:
        return {
            "split_index": self.split_index,
            "n_test": int(self.actual.size),
            "rmse": self.rmse,
            "residual_mean": self.residual_mean,
            "residual_variance": self.residual_variance,
            "train_mean": self.train_mean,
        }


def pi_weights(spec: ModelSpec, M: int) -> CoeffSeq:
    """AR(inf) coefficients of ``(1 - 2u e^{-lam} z + e^{-2 lam} z^2)^d Phi(z) / Theta(z)``.

    The Gegenbauer factor with exponent ``+d`` expands as ``C_n^{-d}(u) e^{-lam n}``.
    """
    if not spec.d > -0.5:
        raise DomainError(f"not invertible: d must exceed -1/2 (d = {spec.d})")
    if abs(spec.u) > 1 or spec.lam < 0:
        raise DomainError("need |u| <= 1 and lambda >= 0")
    if not polynomial_roots_outside(ma_polynomial(spec.ma)):
        raise DomainError("not invertible: MA root on or inside the unit circle")
    g = gegenbauer_coeffs(-spec.d, spec.u, M)
    damp = np.exp(-spec.lam * np.arange(M + 1))
    pi = lfilter(ar_polynomial(spec.ar), ma_polynomial(spec.ma), np.asarray(g.values) * damp)
    pi.flags.writeable = False
    return CoeffSeq(pi, len(pi), g.tail_bound * math.exp(-spec.lam * (M + 1)))


def split_index(n: int, split_frac: float) -> int:
    if not 0 < split_frac < 1:
        raise DomainError(f"split fraction must lie in (0, 1), got {split_frac}")
    k = int(round(split_frac * n))
    return min(max(k, 1), n - 1)


def one_step_forecasts(spec: ModelSpec, series, split_frac: float = 0.75,
                       M: Optional[int] = None) -> ForecastReport:
    """Rolling one-step predictions ``x_t = -sum_{j>=1} pi_j x_{t-j}`` on the test segment.

    Parameters stay frozen; every past observation (train and earlier test)
    conditions the forecast.  The train mean is removed first and added back.
    """
    x = np.asarray(series, dtype=float)
    if x.size < 40:
        raise DomainError(f"forecasting needs at least 40 observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("series contains non-finite values")
    k = split_index(x.size, split_frac)
    mean = float(x[:k].mean())
    xc = x - mean
    M = min(k, MAX_PI_LEN) if M is None else M
    pi = np.asarray(pi_weights(spec, M).values)
    # conv[t-1] = sum_{j=1}^{M} pi_j xc[t-j]
    conv = np.convolve(xc, pi[1:])[: x.size]
    pred = -conv[k - 1: x.size - 1] + mean
    actual = x[k:]
    resid = actual - pred
    mse = float(np.mean(resid * resid))
    return ForecastReport(
        split_index=k, actual=actual, predictions=pred, mse=mse, rmse=math.sqrt(mse),
        residual_mean=float(resid.mean()),
        residual_variance=float(resid.var(ddof=1)) if resid.size > 1 else 0.0,
        train_mean=mean,
    )


@dataclass
class ComparisonRow:
    family: ModelFamily
    p: int
    q: int
    estimate: Optional[EstimationResult]
    report: Optional[ForecastReport]
    failed: bool = False
    error: str = ""

    @property
    def rmse(self) -> float:
        return self.report.rmse if self.report is not None else math.inf

    def to_dict(self) -> dict:
        out = {"family": self.family.value, "p": self.p, "q": self.q,
               "failed": self.failed, "rmse": None if self.failed else self.rmse}
        if self.estimate is not None:
            out["estimate"] = self.estimate.to_dict()
        if self.error:
            out["error"] = self.error
        return out


def _fit_candidate(job):
    x, k, split_frac, family, p, q, method, options = job
    try:
        est = fit(x[:k], p, q, method, family, options)
        report = one_step_forecasts(est.to_spec(), x, split_frac)
        return ComparisonRow(family, p, q, est, report)
    except Exception as exc:  # recorded as a failed row
        return ComparisonRow(family, p, q, None, None, True, f"{type(exc).__name__}: {exc}")


def compare_models(series, candidates: Sequence[tuple], split_frac: float = 0.75,
                   method: str = "nls", options: Optional[FitOptions] = None,
                   workers: Optional[int] = None) -> list:
    """Fit each ``(family, p, q)`` on the train segment and rank by test RMSE.

    Candidates are independent, so with ``workers > 1`` (or ``GARTFIMA_THREADS``)
    they are fitted in separate processes.  The ranking does not depend on it.
    """
    if not candidates:
        raise DomainError("need at least one candidate")
    x = np.asarray(series, dtype=float)
    k = split_index(x.size, split_frac)
    jobs = [(x, k, split_frac, ModelFamily.parse(f), p, q, method, options)
            for f, p, q in candidates]
    nw = min(worker_count(workers), len(jobs))
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as ex:
            rows = list(ex.map(_fit_candidate, jobs))
    else:
        rows = [_fit_candidate(j) for j in jobs]
    rows.sort(key=lambda r: (r.failed, r.rmse))
    return rows
