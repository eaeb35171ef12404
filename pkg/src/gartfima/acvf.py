"""Autocovariance functions.

Three independent routes are available:

* ``series``          gamma_w(k) = sigma2 sum_n C_n C_{n+k} e^{-(2n+k) lambda}
* ``hypergeometric``  closed form of the ``u = 1`` (ARTFIMA) reduction
* ``fft``             numerical inversion of the spectral density

The ARMA-modulated autocovariance is obtained from the FFT route when the
density is bounded, and otherwise by filtering the series route with the
ARMA psi-weights.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve

from .errors import DomainError
from .model import ModelSpec, validate
from .numerics import (CoeffSeq, arma_psi_weights, gauss_2f1, gegenbauer_coeffs,
                       ln_gamma)
from .spectrum import density_shape

__all__ = [
    "AcvfSequence",
    "SummabilityReport",
    "gartfima_core_acvf",
    "artfima_acvf",
    "acvf_fft",
    "full_acvf",
    "sample_acvf",
    "summability_diagnostic",
]

SERIES_CAP = 2**20
SERIES_RTOL = 1e-10
_DIRECT_LAGS = 64


class TruncationWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class AcvfSequence:
    """gamma(0 .. h_max) together with how it was computed."""

    values: np.ndarray
    method: str
    truncation: Optional[CoeffSeq] = None
    warning: Optional[str] = None
    aliasing_error: Optional[float] = None

    def __len__(self):
        return len(self.values)

    def __getitem__(self, idx):
        return self.values[idx]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _lagged_products(a: np.ndarray, h_max: int) -> np.ndarray:
    """sum_n a_n a_{n+h} for h = 0 .. h_max over the stored coefficients."""
    if h_max <= _DIRECT_LAGS:
        return np.array([a[: a.size - h] @ a[h:] for h in range(h_max + 1)])
    full = fftconvolve(a, a[::-1])
    return full[a.size - 1: a.size + h_max]


def _check_core(d, lam, u):
    if not abs(d) < 0.5:
        raise DomainError(f"|d| < 1/2 required, got d={d}")
    if lam < 0:
        raise DomainError(f"lambda >= 0 required, got {lam}")
    if abs(u) > 1:
        raise DomainError(f"|u| <= 1 required, got u={u}")
    if lam == 0 and abs(u) == 1 and d >= 0.25:
        raise DomainError(f"at lambda = 0, |u| = 1 the variance is infinite for d >= 1/4 (d={d})")


def gartfima_core_acvf(d: float, lam: float, u: float, sigma2: float, h_max: int,
                       cap: int = SERIES_CAP) -> AcvfSequence:
    """Autocovariance of ``W_t = (1 - 2u e^{-lam} B + e^{-2 lam} B^2)^{-d} eps_t``.

    The Gegenbauer series is summed to a length ``N`` chosen by doubling until
    ``sigma2 * tail^2 * e^{-2 N lam} / (1 - e^{-2 lam})`` falls below
    ``1e-10 * gamma(0)``.  With ``lambda = 0`` (or when the cap is hit first)
    the sum stops at ``cap`` terms and the result carries a warning.
    """
    _check_core(d, lam, u)
    if sigma2 <= 0:
        raise DomainError("sigma2 must be positive")
    if h_max < 0:
        raise DomainError("h_max must be nonnegative")
    warn = None
    if d == 0.0:
        n = 1
    elif lam == 0.0:
        n = cap
        warn = f"lambda = 0: Gegenbauer series truncated at {cap} terms"
    else:
        n = 64
        damp = 1.0 - math.exp(-2.0 * lam)
        while True:
            seq = gegenbauer_coeffs(d, u, n)
            a = seq.values * np.exp(-lam * np.arange(n + 1))
            g0 = sigma2 * (a @ a)
            tail = sigma2 * seq.tail_bound**2 * math.exp(-2.0 * n * lam) / damp
            if tail < SERIES_RTOL * g0:
                break
            if n >= cap:
                warn = f"series truncated at cap {cap} before reaching tolerance"
                break
            n = min(2 * n, cap)
    seq = gegenbauer_coeffs(d, u, n + h_max)
    a = seq.values * np.exp(-lam * np.arange(seq.truncation_len)) if lam else np.asarray(seq.values)
    gamma = sigma2 * _lagged_products(a, h_max)
    if warn:
        warnings.warn(warn, TruncationWarning, stacklevel=2)
    return AcvfSequence(gamma, "series", truncation=seq, warning=warn)


def _binomial_ratio(d2: float, h: int) -> float:
    # Gamma(d2 + h) / (Gamma(d2) Gamma(h + 1)), valid for any real d2
    if d2 > 0:
        return math.exp(ln_gamma(d2 + h) - ln_gamma(d2) - ln_gamma(h + 1.0))
    out = 1.0
    for k in range(h):
        out *= (d2 + k) / (k + 1.0)
    return out


def artfima_acvf(d2: float, lam: float, sigma2: float, h_max: int) -> AcvfSequence:
    """Closed-form ARTFIMA(0, d2, lambda, 0) autocovariance

        gamma(h) = sigma2 e^{-lambda h} Gamma(d2 + h) / (Gamma(d2) h!)
                   * 2F1(d2, h + d2; h + 1; e^{-2 lambda}).

    ``d2`` is the ARTFIMA order, i.e. twice the GARTFIMA ``d`` at ``u = 1``.
    """
    if lam <= 0:
        raise DomainError("artfima_acvf needs lambda > 0 (2F1 argument e^{-2 lambda} < 1)")
    if h_max < 0:
        raise DomainError("h_max must be nonnegative")
    z = math.exp(-2.0 * lam)
    vals = np.empty(h_max + 1)
    for h in range(h_max + 1):
        if d2 == 0.0:
            vals[h] = sigma2 if h == 0 else 0.0
            continue
        coef = _binomial_ratio(d2, h)
        vals[h] = sigma2 * math.exp(-lam * h) * coef * gauss_2f1(d2, h + d2, h + 1.0, z)
    return AcvfSequence(vals, "hypergeometric")


def _fft_invert(spec: ModelSpec, n_fft: int, h_max: int) -> np.ndarray:
    omega = 2.0 * np.pi * np.arange(n_fft) / n_fft
    f = spec.sigma2 / (2.0 * np.pi) * density_shape(spec.d, spec.lam, spec.u, spec.ar, spec.ma, omega)
    # trapezoid rule on the periodic integrand: (2 pi / N) sum f(w_k) e^{i w_k h}
    return 2.0 * np.pi * np.fft.ifft(f).real[: h_max + 1]


def acvf_fft(spec: ModelSpec, h_max: int) -> AcvfSequence:
    """Autocovariance by discrete inversion of the (bounded) spectral density."""
    if h_max < 0:
        raise DomainError("h_max must be nonnegative")
    report = validate(spec, strict=False)
    report.raise_if_invalid()
    if spec.lam == 0 and spec.d > 0:
        raise DomainError("density has a pole (lambda = 0, d > 0); use the series route")
    n_fft = 1 << max(13, int(math.ceil(math.log2(8 * max(h_max, 1)))))
    gamma = _fft_invert(spec, n_fft, h_max)
    gamma2 = _fft_invert(spec, 2 * n_fft, h_max)
    err = float(np.max(np.abs(gamma2 - gamma)))
    return AcvfSequence(gamma2, "fft", aliasing_error=err)


def _psi_truncation(ar, ma, tol: float = 1e-14, cap: int = 4096) -> np.ndarray:
    n = 64
    while True:
        psi = arma_psi_weights(ar, ma, n)
        if psi.tail_bound < tol or n >= cap:
            return np.asarray(psi.values)
        n *= 2


def full_acvf(spec: ModelSpec, h_max: int) -> AcvfSequence:
    """Autocovariance of the full GARTFIMA(p, d, lambda, u, q) process.

    Bounded densities are inverted by FFT.  When the density has a pole
    (``lambda = 0``, ``d > 0``) the core series autocovariance is filtered
    through the ARMA part: ``gamma_X(h) = sum_m r_psi(m) gamma_W(h - m)``
    with ``r_psi`` the autocorrelation sequence of the psi-weights.
    """
    if not (spec.lam == 0 and spec.d > 0):
        return acvf_fft(spec, h_max)
    validate(spec, strict=False).raise_if_invalid()
    if not spec.ar and not spec.ma:
        return gartfima_core_acvf(spec.d, spec.lam, spec.u, spec.sigma2, h_max)
    psi = _psi_truncation(spec.ar, spec.ma)
    k = psi.size - 1
    core = gartfima_core_acvf(spec.d, spec.lam, spec.u, spec.sigma2, h_max + k)
    r = np.correlate(psi, psi, mode="full")  # lags -k .. k
    gw = np.asarray(core.values)
    lags = np.arange(-k, k + 1)
    out = np.array([r @ gw[np.abs(h - lags)] for h in range(h_max + 1)])
    return AcvfSequence(out, "series", truncation=core.truncation, warning=core.warning)


def sample_acvf(series, h_max: int) -> np.ndarray:
    """Biased sample autocovariance about the sample mean (divisor ``n``)."""
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    n = x.size
    full = fftconvolve(x, x[::-1])
    return full[n - 1: n + h_max] / n


@dataclass(frozen=True)
class SummabilityReport:
    """Diagnostic for the growth of sum_{h <= H} |gamma(h)|.

    Attributes
    ----------
    converged : bool
        Whether the Gegenbauer series defining gamma itself converges, judged
        from the ratio of consecutive dyadic blocks of sum_n a_n^2.
    block_ratio : float
        That ratio; below 1 means geometric decay of the block sums.
    lags : ndarray
        The checkpoints H.
    increments : ndarray or None
        |gamma(H)|, the increment of the partial sum at each checkpoint.
    partial_sums : ndarray or None
        sum_{h <= H} |gamma(h)| at each checkpoint.
    """

    converged: bool
    block_ratio: float
    lags: np.ndarray
    increments: Optional[np.ndarray]
    partial_sums: Optional[np.ndarray]

    @property
    def increments_decreasing(self) -> bool:
        if self.increments is None:
            return False
        inc = self.increments
        return bool(np.all(np.diff(inc) < 0))

    @property
    def block_increments(self) -> Optional[np.ndarray]:
        if self.partial_sums is None:
            return None
        return np.diff(self.partial_sums)


def summability_diagnostic(d: float, lam: float, u: float, sigma2: float = 1.0,
                           lags=tuple(2**k for k in range(10, 15)),
                           cap: int = SERIES_CAP) -> SummabilityReport:
    """Check convergence of the core autocovariance series and track sum |gamma(h)|.

    No validity check is applied, so parameters outside the stationary region
    can be examined; divergence shows up as ``converged = False``.
    """
    lags = np.asarray(sorted(lags), dtype=int)
    h_top = int(lags[-1])
    seq = gegenbauer_coeffs(d, u, cap + h_top)
    a = np.asarray(seq.values) * np.exp(-lam * np.arange(seq.truncation_len))
    sq = a[: cap + 1] ** 2
    k_top = int(math.log2(cap))
    blocks = [sq[2**k: 2 ** (k + 1)].sum() for k in (k_top - 2, k_top - 1)]
    ratio = float(blocks[1] / blocks[0]) if blocks[0] > 0 else 0.0
    if not ratio < 1.0:
        return SummabilityReport(False, ratio, lags, None, None)
    gamma = sigma2 * fftconvolve(a, a[::-1])[a.size - 1: a.size + h_top]
    partial = np.cumsum(np.abs(gamma))
    return SummabilityReport(True, ratio, lags, np.abs(gamma[lags]), partial[lags])
