"""Autocovariance routes and their cross-checks."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from gartfima.acvf import (
    TruncationWarning,
    acvf_fft,
    artfima_acvf,
    full_acvf,
    gartfima_core_acvf,
    sample_acvf,
    summability_diagnostic,
)
from gartfima.errors import DomainError
from gartfima.model import ModelSpec
from gartfima.numerics import gegenbauer_coeffs
from gartfima.spectrum import spectral_density

# Frozen from a 40-digit mpmath summation of sigma2 sum_n b_n b_{n+1} e^{-lam(2n+1)},
# b_n = Gamma(n + 0.4) / (Gamma(0.4) n!).
ARTFIMA_04_03_H1 = 0.36495288362400075


def _quad_acvf(spec, h):
    phi = math.acos(spec.u)
    val = quad(lambda w: spectral_density(spec, w) * math.cos(h * w), 0, math.pi, points=[phi],
               limit=500, epsabs=1e-13, epsrel=1e-12)[0]
    return 2 * val


class TestCoreSeries:
    def test_zero_d(self):
        g = gartfima_core_acvf(0.0, 0.3, 0.5, 2.5, 4).values
        np.testing.assert_allclose(g, [2.5, 0, 0, 0, 0], atol=1e-15)

    def test_large_lambda(self):
        g = gartfima_core_acvf(0.3, 50.0, 0.2, 1.0, 1).values
        assert g[0] == pytest.approx(1.0, abs=1e-15)
        assert abs(g[1]) < 1e-20

    def test_quadrature_oracle(self):
        spec = ModelSpec(d=0.3, lam=0.4, u=0.2)
        g = gartfima_core_acvf(0.3, 0.4, 0.2, 1.0, 5).values
        for h in range(6):
            assert g[h] == pytest.approx(_quad_acvf(spec, h), abs=1e-8)

    def test_garma_partial_sums(self):
        d, u, k_max = 0.2, 0.3, 6
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            res = gartfima_core_acvf(d, 0.0, u, 1.0, k_max)
        c = np.asarray(gegenbauer_coeffs(d, u, 2**20 + k_max).values)
        ref = [c[: c.size - k] @ c[k:] for k in range(k_max + 1)]
        np.testing.assert_allclose(res.values, ref, rtol=1e-9)

    def test_zero_lambda_warns(self):
        with pytest.warns(TruncationWarning):
            res = gartfima_core_acvf(0.2, 0.0, 0.3, 1.0, 2)
        assert res.warning

    def test_invalid(self):
        with pytest.raises(DomainError):
            gartfima_core_acvf(0.7, 0.3, 0.2, 1.0, 3)

    @given(d=st.floats(-0.45, 0.45), lam=st.floats(0.05, 2.0), u=st.floats(-0.95, 0.95))
    @settings(max_examples=25, deadline=None)
    def test_bounded_by_variance_and_tempered(self, d, lam, u):
        g = gartfima_core_acvf(d, lam, u, 1.0, 64).values
        assert g[0] > 0
        assert np.all(np.abs(g) <= g[0] * (1 + 1e-12))
        # |gamma(h)| e^{lam h} stays bounded
        scaled = np.abs(g) * np.exp(lam * np.arange(65))
        assert np.all(np.isfinite(scaled))
        assert scaled[32:].max() <= 10 * max(scaled[:32].max(), 1.0)


class TestArtfima:
    def test_frozen_oracle(self):
        assert artfima_acvf(0.4, 0.3, 1.0, 1).values[1] == pytest.approx(ARTFIMA_04_03_H1, rel=1e-12)

    def test_frozen_oracle_mpmath(self):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 40
        d2, lam = mpmath.mpf("0.4"), mpmath.mpf("0.3")

        def b(n):
            return mpmath.gamma(n + d2) / (mpmath.gamma(d2) * mpmath.factorial(n))

        s = mpmath.nsum(lambda n: b(n) * b(n + 1) * mpmath.exp(-lam * (2 * n + 1)), [0, mpmath.inf])
        assert float(s) == pytest.approx(ARTFIMA_04_03_H1, rel=1e-14)

    def test_large_lambda(self):
        assert artfima_acvf(0.4, 40.0, 2.0, 0).values[0] == pytest.approx(2.0, rel=1e-14)

    def test_zero_lambda(self):
        with pytest.raises(DomainError):
            artfima_acvf(0.4, 0.0, 1.0, 3)

    def test_matches_series_at_u1(self):
        a = artfima_acvf(0.4, 0.5, 1.0, 20).values
        s = gartfima_core_acvf(0.2, 0.5, 1.0, 1.0, 20).values
        np.testing.assert_allclose(s, a, rtol=1e-8)


class TestFft:
    def test_ar1(self):
        g = acvf_fft(ModelSpec(ar=(0.6,), sigma2=1.5), 10).values
        np.testing.assert_allclose(g, 1.5 * 0.6 ** np.arange(11) / (1 - 0.36), rtol=1e-8, atol=1e-12)

    def test_matches_series(self):
        f = acvf_fft(ModelSpec(d=0.3, lam=0.4, u=0.2), 32).values
        s = gartfima_core_acvf(0.3, 0.4, 0.2, 1.0, 32).values
        np.testing.assert_allclose(f, s, rtol=1e-6, atol=1e-6 * s[0])

    def test_pole_rejected(self):
        with pytest.raises(DomainError):
            acvf_fft(ModelSpec(d=0.2, lam=0.0, u=0.3), 5)

    def test_aliasing_reported(self):
        res = acvf_fft(ModelSpec(d=0.3, lam=0.4, u=0.2), 8)
        assert res.aliasing_error is not None and res.aliasing_error < 1e-8


class TestFull:
    def test_core_only(self):
        g = full_acvf(ModelSpec(d=0.3, lam=0.4, u=0.2), 16).values
        s = gartfima_core_acvf(0.3, 0.4, 0.2, 1.0, 16).values
        np.testing.assert_allclose(g, s, rtol=1e-6, atol=1e-9)

    def test_garma_core(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            g = full_acvf(ModelSpec(d=0.2, lam=0.0, u=0.3), 8).values
            s = gartfima_core_acvf(0.2, 0.0, 0.3, 1.0, 8).values
        np.testing.assert_allclose(g, s, rtol=1e-6)

    def test_ma1(self):
        g = full_acvf(ModelSpec(ma=(0.4,), sigma2=2.0), 4).values
        np.testing.assert_allclose(g, [2 * 1.16, 0.8, 0, 0, 0], atol=1e-10)

    def test_pole_with_arma_matches_quadrature(self):
        spec = ModelSpec(d=0.15, lam=0.0, u=0.5, ar=(0.5,))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            g = full_acvf(spec, 3).values
        # the lambda = 0 series is capped; its omitted tail is about 4e-6 of gamma(0) here
        for h in range(4):
            assert g[h] == pytest.approx(_quad_acvf(spec, h), abs=1e-5 * g[0])

    @given(d=st.floats(-0.45, 0.45), lam=st.floats(0.0, 2.0), u=st.floats(-0.95, 0.95),
           phi=st.floats(-0.8, 0.8))
    @settings(max_examples=20, deadline=None)
    def test_toeplitz_psd(self, d, lam, u, phi):
        if lam < 0.02 and d > 0:
            lam = 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            g = full_acvf(ModelSpec(d=d, lam=lam, u=u, ar=(phi,)), 64).values
        idx = np.abs(np.subtract.outer(np.arange(65), np.arange(65)))
        assert np.linalg.eigvalsh(g[idx]).min() >= -1e-8 * g[0]


def test_sample_acvf():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    xc = x - 2.5
    ref = [xc @ xc / 4, xc[:-1] @ xc[1:] / 4]
    np.testing.assert_allclose(sample_acvf(x, 1), ref)


class TestSummability:
    def test_below_quarter(self):
        rep = summability_diagnostic(0.2, 0.0, 1.0)
        assert rep.converged
        assert rep.increments_decreasing
        assert np.all(rep.increments > 0)

    def test_above_quarter(self):
        rep = summability_diagnostic(0.3, 0.0, 1.0)
        assert not rep.converged
        assert not rep.increments_decreasing
