"""Sample paths by truncated MA(inf) filtering followed by the ARMA recursion."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import DomainError
from .model import ModelSpec, validate
from .numerics import CoeffSeq, ar_polynomial, gegenbauer_coeffs, ma_polynomial

__all__ = ["SimulationConfig", "gartfima_ma_weights", "make_rng", "stream_seed", "simulate"]


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    seed: int = 0
    burnin: int = 500
    trunc_len: int = 1000

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.trunc_len < 1:
            raise DomainError(f"trunc_len must be >= 1, got {self.trunc_len}")
        if self.burnin < 0:
            raise DomainError(f"burnin must be >= 0, got {self.burnin}")
        if self.seed < 0:
            raise DomainError("seed must be an unsigned integer")


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox generator keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(int(seed)))


def stream_seed(base_seed: int, replication: int) -> int:
    """Seed of replication ``r``: ``base_seed XOR r``."""
    return int(base_seed) ^ int(replication)


def gartfima_ma_weights(spec: ModelSpec, M: int) -> CoeffSeq:
    """Coefficients ``C_n^d(u) e^{-lambda n}``, n = 0..M, of the tempered Gegenbauer filter."""
    seq = gegenbauer_coeffs(spec.d, spec.u, M)
    w = np.asarray(seq.values) * np.exp(-spec.lam * np.arange(M + 1))
    w.flags.writeable = False
    return CoeffSeq(w, len(w), seq.tail_bound * math.exp(-spec.lam * (M + 1)))


def simulate(spec: ModelSpec, config: SimulationConfig, strict: bool = False) -> np.ndarray:
    """Simulate ``config.n`` observations of the GARTFIMA process.

    Innovations ``eps ~ N(0, sigma2)`` of length ``n + burnin + M`` are passed
    through the truncated filter ``eta_t = sum_{k<=M} w_k eps_{t-k}``, then
    ``Phi(B) X_t = Theta(B) eta_t`` is run from zero initial conditions and
    the first ``burnin`` values are dropped.  ``strict=False`` admits the
    ``|u| = 1`` reductions.
    """
    validate(spec, strict=strict).raise_if_invalid()
    m = config.trunc_len
    rng = make_rng(config.seed)
    z = rng.standard_normal(config.n + config.burnin + m)
    eps = math.sqrt(spec.sigma2) * z
    w = gartfima_ma_weights(spec, m).values
    eta = np.convolve(eps, w, mode="valid")
    x = lfilter(ma_polynomial(spec.ma), ar_polynomial(spec.ar), eta)
    return x[config.burnin:]
