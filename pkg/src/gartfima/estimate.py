"""Log-periodogram NLS and Whittle estimation of GARTFIMA parameters.

Both estimators work on the periodogram at the Fourier frequencies
``2 pi j / n``, ``j = 1 .. n // 2``.

NLS regresses ``log I(w_j)`` on

    intercept - d log(A - B cos w_j + C cos^2 w_j) + log(f_u(w_j) / f_u(0)),

where ``f_u`` is the ARMA spectral density and the intercept stands for
``log f_u(0)``.  The regression error ``log(I/f)`` has mean ``-0.5772``
(Euler's constant) rather than zero; no correction is applied, so the
intercept absorbs that shift.

Whittle minimises ``sum_j [I(w_j)/f(w_j) + log f(w_j)]`` with ``sigma2``
profiled out analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, SpectralPoleError
from .model import ModelFamily, ModelSpec
from .optimize import PENALTY, optimize
from .spectrum import Periodogram, arma_gain, density_shape, gegenbauer_factor, periodogram

__all__ = [
    "EstimationResult",
    "FitOptions",
    "nls_objective",
    "nls_profile",
    "nls_fit",
    "whittle_objective",
    "whittle_profile",
    "whittle_fit",
    "fit",
    "select_orders",
    "partials_to_poly",
    "poly_to_partials",
]

D_BOUND = 0.5
_EPS_BOX = 1e-6


@dataclass
class FitOptions:
    restarts: int = 4
    max_evals: int = 2000
    tol: float = 1e-8
    band_frac: float = 1.0


@dataclass
class EstimationResult:
    d_hat: float
    lambda_hat: float
    u_hat: float
    sigma2_hat: float
    objective: float
    n_freqs_used: int
    converged: bool
    restarts_used: int
    method: str
    family: ModelFamily = ModelFamily.GARTFIMA
    ar_hat: tuple = ()
    ma_hat: tuple = ()
    intercept_hat: Optional[float] = None
    n_dropped: int = 0
    band_frac: float = 1.0
    nfev: int = 0

    @property
    def effective_d(self) -> float:
        """Fractional order in the family's own parametrisation (2d at u = 1)."""
        if self.family in (ModelFamily.ARTFIMA, ModelFamily.ARFIMA):
            return 2.0 * self.d_hat
        return self.d_hat

    def to_spec(self) -> ModelSpec:
        return ModelSpec(d=self.d_hat, lam=self.lambda_hat, u=self.u_hat,
                         ar=self.ar_hat, ma=self.ma_hat, sigma2=self.sigma2_hat)

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "family": self.family.value,
            "d": self.d_hat,
            "lambda": self.lambda_hat,
            "u": self.u_hat,
            "ar": list(self.ar_hat),
            "ma": list(self.ma_hat),
            "sigma2": self.sigma2_hat,
            "objective": self.objective,
            "converged": self.converged,
            "n_freqs_used": self.n_freqs_used,
            "n_dropped": self.n_dropped,
            "restarts_used": self.restarts_used,
            "band_frac": self.band_frac,
        }
        if self.intercept_hat is not None:
            out["intercept"] = self.intercept_hat
        return out


# -- ARMA parametrisation ---------------------------------------------------

def partials_to_poly(partials) -> np.ndarray:
    """Map partial autocorrelations in (-1, 1) to stationary AR coefficients.

    Durbin-Levinson step: phi_j <- phi_j - r_k phi_{k-j}, phi_k <- r_k.
    """
    phi = np.zeros(0)
    for r in partials:
        phi = np.concatenate((phi - r * phi[::-1], [r]))
    return phi


def poly_to_partials(phi) -> np.ndarray:
    """Inverse of :func:`partials_to_poly` for stationary AR coefficients."""
    phi = np.asarray(phi, dtype=float).copy()
    out = []
    while phi.size:
        r = phi[-1]
        out.append(r)
        prev = phi[:-1]
        phi = (prev + r * prev[::-1]) / (1.0 - r * r)
    return np.array(out[::-1])


# -- objectives -------------------------------------------------------------

def _band(pgram: Periodogram, band) -> tuple[np.ndarray, np.ndarray, int]:
    freqs, ords = pgram.freqs, pgram.ordinates
    if band is not None:
        if isinstance(band, slice):
            freqs, ords = freqs[band], ords[band]
        else:
            lo, hi = band
            freqs, ords = freqs[lo:hi], ords[lo:hi]
    keep = ords > 0
    dropped = int(np.count_nonzero(~keep))
    if not np.any(keep):
        raise DomainError("no positive periodogram ordinates in the band")
    return freqs[keep], ords[keep], dropped


def band_for_fraction(pgram: Periodogram, band_frac: float) -> tuple[int, int]:
    """Index range of the lowest ``band_frac`` share of the Fourier frequencies."""
    if not 0 < band_frac <= 1:
        raise DomainError(f"band_frac must lie in (0, 1], got {band_frac}")
    m = len(pgram)
    return 0, max(1, int(math.ceil(band_frac * m)))


def _nls_regressor(d, lam, u, ar, ma, freqs):
    if d != 0:
        fac = gegenbauer_factor(u, lam, freqs)
        if np.any(fac == 0.0):
            raise SpectralPoleError(f"spectral pole on the frequency grid (u = {u})")
        reg = -d * np.log(fac)
    else:
        reg = np.zeros_like(freqs)
    if len(ar) or len(ma):
        reg = reg + np.log(arma_gain(ar, ma, freqs) / arma_gain(ar, ma, np.zeros(1))[0])
    return reg


def nls_objective(theta, intercept: float, pgram: Periodogram, band=None,
                  ar=(), ma=()) -> float:
    """Sum of squared log-periodogram regression residuals.

    ``theta = (d, lambda, u)``.  ``band`` is an index range ``(lo, hi)`` or a
    slice into the Fourier frequencies; zero ordinates are skipped.
    """
    d, lam, u = theta
    freqs, ords, _ = _band(pgram, band)
    resid = np.log(ords) - intercept - _nls_regressor(d, lam, u, ar, ma, freqs)
    return float(resid @ resid)


def nls_profile(theta, pgram: Periodogram, band=None, ar=(), ma=()) -> tuple[float, float]:
    """NLS objective minimised over the intercept; returns ``(value, intercept)``."""
    d, lam, u = theta
    freqs, ords, _ = _band(pgram, band)
    y = np.log(ords) - _nls_regressor(d, lam, u, ar, ma, freqs)
    intercept = float(y.mean())
    resid = y - intercept
    return float(resid @ resid), intercept


def whittle_profile(theta, pgram: Periodogram, ar=(), ma=(), band=None) -> tuple[float, float, bool]:
    """Profiled Whittle objective.

    With ``f = sigma2 g / (2 pi)``, ``sigma2`` is replaced by its minimiser
    ``(2 pi / m) sum I / g`` and the returned value equals
    ``sum [I/f + log f]`` there, i.e. ``m log sigma2 + sum log g + m (1 - log 2 pi)``.

    Returns ``(value, sigma2_hat, pole)``; on a pole the value is a large
    finite penalty and ``pole`` is True.
    """
    d, lam, u = theta
    freqs, ords, _ = _band(pgram, band)
    m = freqs.size
    try:
        g = density_shape(d, lam, u, ar, ma, freqs)
    except SpectralPoleError:
        return PENALTY, float("nan"), True
    if not np.all(np.isfinite(g)) or np.any(g <= 0):
        return PENALTY, float("nan"), True
    sigma2 = 2.0 * np.pi / m * float(np.sum(ords / g))
    value = m * math.log(sigma2) + float(np.sum(np.log(g))) + m * (1.0 - math.log(2.0 * np.pi))
    return value, sigma2, False


def whittle_objective(theta, pgram: Periodogram, ar=(), ma=(), band=None) -> float:
    return whittle_profile(theta, pgram, ar, ma, band)[0]


# -- fitting ----------------------------------------------------------------

@dataclass
class _Layout:
    """Which parameters are free for a given family and ARMA order."""

    family: ModelFamily
    p: int
    q: int
    names: list = field(default_factory=list)
    bounds: list = field(default_factory=list)

    def __post_init__(self):
        fam = self.family
        box = D_BOUND - _EPS_BOX
        if fam is not ModelFamily.ARMA:
            dmax = box / 2 if fam is ModelFamily.ARFIMA else box
            self._add("d", (-dmax, dmax))
        if fam in (ModelFamily.GARTFIMA, ModelFamily.ARTFIMA):
            self._add("lambda", (0.0, math.inf))
        if fam in (ModelFamily.GARTFIMA, ModelFamily.GARMA, ModelFamily.GEGENBAUER):
            self._add("u", (-1.0 + _EPS_BOX, 1.0 - _EPS_BOX))
        for i in range(self.p):
            self._add(f"ar_pacf{i + 1}", (-0.99, 0.99))
        for i in range(self.q):
            self._add(f"ma_pacf{i + 1}", (-0.99, 0.99))

    def _add(self, name, bound):
        self.names.append(name)
        self.bounds.append(bound)

    def unpack(self, x):
        vals = dict(zip(self.names, x))
        d = vals.get("d", 0.0)
        lam = vals.get("lambda", 0.0)
        if self.family in (ModelFamily.ARTFIMA, ModelFamily.ARFIMA):
            u = 1.0
        else:
            u = vals.get("u", 0.0)
        ar = partials_to_poly([vals[f"ar_pacf{i + 1}"] for i in range(self.p)])
        # Theta(z) = Phi_s(z) keeps the MA part invertible
        ma = -partials_to_poly([vals[f"ma_pacf{i + 1}"] for i in range(self.q)])
        return float(d), float(lam), float(u), tuple(ar), tuple(ma)


def _prepare(series, band_frac):
    x = np.asarray(series, dtype=float)
    if x.size < 64:
        raise DomainError(f"estimation needs at least 64 observations, got {x.size}")
    pgram = periodogram(x)
    band = band_for_fraction(pgram, band_frac)
    return pgram, band


def fit(series, p: int = 0, q: int = 0, method: str = "nls",
        family=ModelFamily.GARTFIMA, options: Optional[FitOptions] = None,
        pgram: Optional[Periodogram] = None) -> EstimationResult:
    """Fit a GARTFIMA-family model with either estimator.

    Parameters pinned by ``family`` are held fixed (``u = 1`` for
    ARTFIMA/ARFIMA, ``lambda = 0`` for GARMA/ARFIMA, ``d = 0`` for ARMA).
    """
    options = options or FitOptions()
    family = ModelFamily.parse(family)
    if method not in ("nls", "whittle"):
        raise DomainError(f"unknown method {method!r}")
    if p < 0 or q < 0:
        raise DomainError(f"orders must be nonnegative, got p={p}, q={q}")
    if pgram is None:
        pgram, band = _prepare(series, options.band_frac)
    else:
        band = band_for_fraction(pgram, options.band_frac)
    layout = _Layout(family, p, q)
    _, _, n_dropped = _band(pgram, band)

    if method == "nls":
        def objective(x):
            d, lam, u, ar, ma = layout.unpack(x)
            return nls_profile((d, lam, u), pgram, band, ar, ma)[0]
    else:
        def objective(x):
            d, lam, u, ar, ma = layout.unpack(x)
            return whittle_profile((d, lam, u), pgram, ar, ma, band)[0]

    res = optimize(objective, layout.bounds, restarts=options.restarts,
                   max_evals=options.max_evals, tol=options.tol)
    d, lam, u, ar, ma = layout.unpack(res.x)
    theta = (d, lam, u)
    _, sigma2, pole = whittle_profile(theta, pgram, ar, ma, band)
    if method == "nls":
        value, intercept = nls_profile(theta, pgram, band, ar, ma)
    else:
        value, intercept = whittle_profile(theta, pgram, ar, ma, band)[0], None
    m = len(_band(pgram, band)[0])
    return EstimationResult(
        d_hat=d, lambda_hat=lam, u_hat=u, sigma2_hat=sigma2, objective=value,
        n_freqs_used=m, converged=res.converged and not pole,
        restarts_used=res.restarts_used, method=method, family=family,
        ar_hat=ar, ma_hat=ma, intercept_hat=intercept, n_dropped=n_dropped,
        band_frac=options.band_frac, nfev=res.nfev,
    )


def nls_fit(series, p: int = 0, q: int = 0, options: Optional[FitOptions] = None,
            family=ModelFamily.GARTFIMA) -> EstimationResult:
    """Log-periodogram nonlinear least squares fit."""
    return fit(series, p, q, "nls", family, options)


def whittle_fit(series, p: int = 0, q: int = 0, options: Optional[FitOptions] = None,
                family=ModelFamily.GARTFIMA) -> EstimationResult:
    """Whittle likelihood fit with profiled innovation variance."""
    return fit(series, p, q, "whittle", family, options)


def select_orders(series, p_max: int, q_max: int, family=ModelFamily.GARTFIMA,
                  options: Optional[FitOptions] = None) -> tuple[int, int]:
    """AIC order selection over ``p <= p_max``, ``q <= q_max``.

    AIC is ``2k + 2 l_w`` with ``k = p + q + 3`` and ``l_w`` the profiled
    Whittle objective.  Ties go to the smaller ``p + q``, then smaller ``p``.
    """
    if p_max > 5 or q_max > 5 or p_max < 0 or q_max < 0:
        raise DomainError("p_max and q_max must lie in 0..5")
    if p_max == 0 and q_max == 0:
        return 0, 0
    pgram, _ = _prepare(series, 1.0)
    scores = []
    for p in range(p_max + 1):
        for q in range(q_max + 1):
            res = fit(series, p, q, "whittle", family, options, pgram=pgram)
            aic = 2.0 * (p + q + 3) + 2.0 * res.objective
            scores.append((aic, p + q, p, q))
    scores.sort()
    return scores[0][2], scores[0][3]
