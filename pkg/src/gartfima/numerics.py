"""Special functions and power-series helpers.

Everything here is a pure function of its arguments.  Coefficient sequences
are returned as :class:`CoeffSeq` with read-only arrays so they can be shared
freely between callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from .errors import DomainError

__all__ = [
    "CoeffSeq",
    "ln_gamma",
    "gauss_2f1",
    "gegenbauer_coeffs",
    "gegenbauer_tail_bound",
    "gegenbauer_truncation",
    "arma_psi_weights",
    "ar_polynomial",
    "ma_polynomial",
]

_2F1_RTOL = 1e-15
_2F1_MAX_TERMS = 10_000_000


@dataclass(frozen=True)
class CoeffSeq:
    """Truncated coefficient sequence of a power series.

    Attributes
    ----------
    values : ndarray
        Coefficients ``c_0 .. c_{N}``; read-only.
    truncation_len : int
        Number of stored coefficients, ``len(values)``.
    tail_bound : float
        Estimated magnitude bound on the first omitted coefficients.
    """

    values: np.ndarray
    truncation_len: int
    tail_bound: float

    def __post_init__(self):
        if self.truncation_len != len(self.values):
            raise ValueError("truncation_len must equal len(values)")
        if not (math.isfinite(self.tail_bound) and self.tail_bound >= 0):
            raise ValueError("tail_bound must be finite and nonnegative")

    def __len__(self):
        return self.truncation_len

    def __getitem__(self, idx):
        return self.values[idx]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def ln_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x!r}")
    return math.lgamma(x)


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric series 2F1(a, b; c; z) for |z| < 1.

    Terms are generated by the Pochhammer ratio and summed until the next
    term drops below ``1e-15`` of the running sum.
    """
    if not abs(z) < 1:
        raise DomainError(f"gauss_2f1 needs |z| < 1, got z={z!r}")
    if c <= 0 and float(c).is_integer():
        raise DomainError(f"gauss_2f1 undefined for nonpositive integer c={c!r}")
    total = 1.0
    term = 1.0
    for k in range(_2F1_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        if term == 0.0:
            return total
        if abs(term) < _2F1_RTOL * abs(total):
            return total + term
        total += term
    raise DomainError(f"gauss_2f1 failed to converge in {_2F1_MAX_TERMS} terms (z={z})")


def _gegenbauer_envelope(d: float, u: float, n: int) -> float:
    # |C_n^d(u)| ~ n^(d-1) / (|Gamma(d)| sin^d(phi)),  phi = arccos(u)
    if d == 0.0:
        return 0.0
    sin_phi = math.sqrt(max(0.0, 1.0 - u * u))
    # log space: Gamma(d) overflows as d -> 0
    return math.exp((d - 1.0) * math.log(n) - math.lgamma(d) - d * math.log(sin_phi))


def gegenbauer_tail_bound(d: float, u: float, values: np.ndarray) -> float:
    """Conservative size estimate of the coefficients following ``values``."""
    n = len(values) - 1
    last = abs(values[-1])
    if d == 0.0:
        return 0.0
    if abs(u) >= 1.0:
        # binomial coefficients of (1 -+ z)^(-2d): exact ratio to the next one
        return last * abs((n + 2.0 * d) / (n + 1.0))
    recent = float(np.max(np.abs(values[-2:])))
    return 2.0 * max(_gegenbauer_envelope(d, u, n + 1), recent)


@lru_cache(maxsize=64)
def _gegenbauer_cached(d: float, u: float, n_max: int) -> np.ndarray:
    c = [0.0] * (n_max + 1)
    c[0] = 1.0
    if n_max >= 1:
        c[1] = 2.0 * d * u
    two_u = 2.0 * u
    c2, c1 = 1.0, c[1] if n_max >= 1 else 0.0
    for n in range(2, n_max + 1):
        cn = (two_u * (n + d - 1.0) * c1 - (n + 2.0 * d - 2.0) * c2) / n
        c[n] = cn
        c2, c1 = c1, cn
    return _frozen(np.array(c))


def gegenbauer_coeffs(d: float, u: float, n_max: int) -> CoeffSeq:
    """Coefficients of ``(1 - 2 u z + z^2)^(-d)`` up to ``z^n_max``.

    Uses the three-term recurrence

        n C_n = 2u (n + d - 1) C_{n-1} - (n + 2d - 2) C_{n-2},

    with ``C_0 = 1`` and ``C_1 = 2 d u``.

    Notes
    -----
    The generating function is the definition used here.  An explicit
    Gamma-ratio sum for these coefficients also circulates with
    ``Gamma(n+1)`` in the denominator; the standard (and correct) form has
    ``Gamma(k+1) Gamma(n-2k+1)`` instead.  The recurrence sidesteps both and is
    stable for large ``n``.
    """
    if abs(u) > 1.0:
        raise DomainError(f"Gegenbauer coefficients need |u| <= 1, got u={u!r}")
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    values = _gegenbauer_cached(float(d), float(u), int(n_max))
    return CoeffSeq(values, len(values), gegenbauer_tail_bound(d, u, values))


def gegenbauer_truncation(d: float, u: float, radius: float, tol: float = 1e-10,
                          n_cap: int = 2**20) -> int:
    """Truncation length ``N`` (doubling from 16) whose series tail at ``|z| = radius`` is below ``tol``.

    The omitted tail is bounded by ``tail_bound * radius^(N+1) / (1 - radius)``.
    """
    if not 0 <= radius < 1:
        raise DomainError("radius must lie in [0, 1)")
    n = 16
    while True:
        seq = gegenbauer_coeffs(d, u, n)
        if seq.tail_bound * radius ** (n + 1) / (1.0 - radius) < tol or n >= n_cap:
            return n
        n *= 2


def ar_polynomial(ar) -> np.ndarray:
    """Coefficients of Phi(z) = 1 - sum phi_j z^j in ascending powers."""
    return np.concatenate(([1.0], -np.asarray(ar, dtype=float)))


def ma_polynomial(ma) -> np.ndarray:
    """Coefficients of Theta(z) = 1 + sum theta_j z^j in ascending powers."""
    return np.concatenate(([1.0], np.asarray(ma, dtype=float)))


def arma_psi_weights(ar, ma, n_max: int) -> CoeffSeq:
    """Power-series coefficients of Theta(z) / Phi(z), i.e. the MA(inf) weights.

    psi_0 = 1 and psi_j = theta_j + sum_{k=1}^{min(j,p)} phi_k psi_{j-k}.
    """
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    impulse = np.zeros(n_max + 1)
    impulse[0] = 1.0
    psi = lfilter(ma_polynomial(ma), ar_polynomial(ar), impulse)
    ar = np.asarray(ar, dtype=float)
    if ar.size and n_max >= 1:
        # largest inverse AR root sets the geometric decay of the tail
        inv_roots = np.roots(ar_polynomial(ar))
        rho = float(np.max(np.abs(inv_roots))) if inv_roots.size else 0.0
        tail = float(np.max(np.abs(psi[-2:]))) * rho
    else:
        ma = np.asarray(ma, dtype=float)
        tail = float(np.max(np.abs(ma[n_max:]))) if n_max < ma.size else 0.0
    return CoeffSeq(_frozen(psi), len(psi), tail)
