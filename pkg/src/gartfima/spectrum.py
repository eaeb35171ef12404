"""Spectral densities, the harmonic frequency grid and the periodogram.

All densities use the ``sigma2 / (2 pi)`` normalisation on ``[-pi, pi]``, so
that ``gamma(h) = int_{-pi}^{pi} f(w) e^{i w h} dw``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpectralPoleError
from .model import ModelSpec

__all__ = [
    "FrequencyGrid",
    "Periodogram",
    "harmonic_grid",
    "periodogram",
    "periodogram_cosine",
    "abc_constants",
    "abc_expression",
    "gegenbauer_factor",
    "arma_gain",
    "density_shape",
    "spectral_density",
    "arfima_density",
    "artfima_density",
]


@dataclass(frozen=True)
class FrequencyGrid:
    n: int
    freqs: np.ndarray

    def __len__(self):
        return len(self.freqs)


@dataclass(frozen=True)
class Periodogram:
    grid: FrequencyGrid
    ordinates: np.ndarray

    @property
    def freqs(self) -> np.ndarray:
        return self.grid.freqs

    def __len__(self):
        return len(self.ordinates)


def harmonic_grid(n: int) -> FrequencyGrid:
    """Fourier frequencies ``2 pi j / n`` for ``j = 1 .. n // 2``.

    ``j = 0`` is left out: the periodogram of a demeaned series vanishes there.
    """
    if n < 4:
        raise DomainError(f"harmonic grid needs n >= 4, got {n}")
    freqs = 2.0 * np.pi * np.arange(1, n // 2 + 1) / n
    freqs.flags.writeable = False
    return FrequencyGrid(int(n), freqs)


def _as_series(series) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise DomainError("series must be one-dimensional")
    if x.size < 4:
        raise DomainError(f"series needs at least 4 observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("series contains non-finite values")
    return x


def periodogram(series) -> Periodogram:
    """Periodogram ``|DFT(x - mean)|^2 / (2 pi n)`` at the harmonic frequencies."""
    x = _as_series(series)
    n = x.size
    grid = harmonic_grid(n)
    dft = np.fft.rfft(x - x.mean())[1: n // 2 + 1]
    ords = (dft.real**2 + dft.imag**2) / (2.0 * np.pi * n)
    ords.flags.writeable = False
    return Periodogram(grid, ords)


def periodogram_cosine(series) -> Periodogram:
    """Periodogram from sample autocovariances, ``(R(0) + 2 sum R(s) cos(s w)) / 2 pi``.

    O(n^2); kept as an independent check of :func:`periodogram`.
    """
    x = _as_series(series)
    n = x.size
    grid = harmonic_grid(n)
    xc = x - x.mean()
    r = np.correlate(xc, xc, mode="full")[n - 1:] / n
    s = np.arange(1, n)
    ords = (r[0] + 2.0 * np.cos(np.outer(grid.freqs, s)) @ r[1:]) / (2.0 * np.pi)
    ords = np.where((ords < 0) & (ords >= -1e-12), 0.0, ords)
    return Periodogram(grid, ords)


def abc_constants(u: float, lam: float) -> tuple[float, float, float]:
    """Constants with ``A - B cos w + C cos^2 w = |1 - 2u e^{-(lam + i w)} + e^{-2(lam + i w)}|^2``."""
    r2 = math.exp(-2.0 * lam)
    a = 1.0 + 4.0 * u * u * r2 - 2.0 * r2 + r2 * r2
    b = 4.0 * u * math.exp(-lam) * (1.0 + r2)
    c = 4.0 * r2
    return a, b, c


def abc_expression(u: float, lam: float, omega) -> np.ndarray:
    a, b, c = abc_constants(u, lam)
    cw = np.cos(omega)
    return a - b * cw + c * cw * cw


def gegenbauer_factor(u: float, lam: float, omega) -> np.ndarray:
    """``|1 - 2u e^{-lam} z + e^{-2 lam} z^2|^2`` at ``z = e^{-i w}``, cancellation free.

    With ``u = cos(phi)`` and ``r = e^{-lam}`` the quadratic factors as
    ``(1 - r e^{i phi} z)(1 - r e^{-i phi} z)``, and each modulus is
    ``(1 - r)^2 + 4 r sin^2((w -+ phi) / 2)``.  Numerically equal to
    :func:`abc_expression` but accurate next to the spectral pole.
    """
    if abs(u) > 1.0:
        raise DomainError(f"|u| <= 1 required, got u={u!r}")
    omega = np.asarray(omega, dtype=float)
    phi = math.acos(u)
    r = math.exp(-lam)
    base = -math.expm1(-lam)
    base *= base
    s1 = np.sin((omega - phi) / 2.0)
    s2 = np.sin((omega + phi) / 2.0)
    return (base + 4.0 * r * s1 * s1) * (base + 4.0 * r * s2 * s2)


def arma_gain(ar, ma, omega) -> np.ndarray:
    """``|Theta(e^{-i w})|^2 / |Phi(e^{-i w})|^2``."""
    omega = np.asarray(omega, dtype=float)
    num = _poly_modulus_sq(np.concatenate(([1.0], np.asarray(ma, dtype=float))), omega)
    den = _poly_modulus_sq(np.concatenate(([1.0], -np.asarray(ar, dtype=float))), omega)
    return num / den


def _poly_modulus_sq(coeffs: np.ndarray, omega: np.ndarray) -> np.ndarray:
    if coeffs.size == 1:
        return np.ones_like(omega)
    k = np.arange(coeffs.size)
    ang = np.multiply.outer(omega, k)
    re = np.cos(ang) @ coeffs
    im = np.sin(ang) @ coeffs
    return re * re + im * im


def density_shape(d: float, lam: float, u: float, ar, ma, omega) -> np.ndarray:
    """Spectral density divided by ``sigma2 / (2 pi)``.

    Raises :class:`SpectralPoleError` when some frequency sits exactly on a
    pole (``lambda = 0``, ``cos w = u``, ``d > 0``).
    """
    omega = np.asarray(omega, dtype=float)
    gain = arma_gain(ar, ma, omega)
    if d == 0.0:
        return gain
    fac = gegenbauer_factor(u, lam, omega)
    if d > 0 and np.any(fac == 0.0):
        raise SpectralPoleError(f"spectral pole at cos(w) = u = {u} (lambda = {lam}, d = {d})")
    with np.errstate(divide="ignore"):
        return gain * fac ** (-d)


def spectral_density(spec: ModelSpec, omega) -> np.ndarray | float:
    """GARTFIMA spectral density

        f(w) = sigma2 / (2 pi) |Theta|^2 / |Phi|^2 (A - B cos w + C cos^2 w)^(-d).
    """
    scalar = np.ndim(omega) == 0
    out = spec.sigma2 / (2.0 * np.pi) * density_shape(spec.d, spec.lam, spec.u, spec.ar, spec.ma, omega)
    return float(out) if scalar else out


def arfima_density(d: float, sigma2: float, ar, ma, omega) -> np.ndarray | float:
    """ARFIMA density ``sigma2/(2 pi) |Theta|^2/|Phi|^2 (2 sin(w/2))^(-2d)``."""
    scalar = np.ndim(omega) == 0
    omega = np.asarray(omega, dtype=float)
    two_sin = np.abs(2.0 * np.sin(omega / 2.0))
    if d > 0 and np.any(two_sin == 0.0):
        raise SpectralPoleError("ARFIMA density has a pole at w = 0")
    out = sigma2 / (2.0 * np.pi) * arma_gain(ar, ma, omega) * two_sin ** (-2.0 * d)
    return float(out) if scalar else out


def artfima_density(d: float, lam: float, sigma2: float, ar, ma, omega) -> np.ndarray | float:
    """ARTFIMA density ``sigma2/(2 pi) |Theta|^2/|Phi|^2 (1 - 2 e^{-lam} cos w + e^{-2 lam})^(-d)``.

    ``d`` is the ARTFIMA order (twice the GARTFIMA ``d`` at ``u = 1``).
    """
    scalar = np.ndim(omega) == 0
    omega = np.asarray(omega, dtype=float)
    r = math.exp(-lam)
    base = 1.0 - 2.0 * r * np.cos(omega) + r * r
    if d > 0 and np.any(base == 0.0):
        raise SpectralPoleError("ARTFIMA density has a pole at w = 0 when lambda = 0")
    out = sigma2 / (2.0 * np.pi) * arma_gain(ar, ma, omega) * base ** (-d)
    return float(out) if scalar else out
