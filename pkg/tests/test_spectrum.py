"""Frequency grid, periodogram and spectral densities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from gartfima.acvf import gartfima_core_acvf
from gartfima.errors import DomainError, SpectralPoleError
from gartfima.model import ModelSpec
from gartfima.spectrum import (
    abc_constants,
    abc_expression,
    arfima_density,
    artfima_density,
    gegenbauer_factor,
    harmonic_grid,
    periodogram,
    periodogram_cosine,
    spectral_density,
)

params = st.tuples(
    st.floats(-0.45, 0.45),  # d
    st.floats(0.0, 3.0),  # lambda
    st.floats(-0.99, 0.99),  # u
)


class TestGrid:
    def test_even(self):
        np.testing.assert_allclose(harmonic_grid(8).freqs, np.pi * np.array([0.25, 0.5, 0.75, 1.0]))

    def test_thousand(self):
        g = harmonic_grid(1000)
        assert g.freqs.size == 500
        assert g.freqs[-1] == pytest.approx(np.pi)

    def test_odd(self):
        g = harmonic_grid(9)
        assert g.freqs.size == 4
        assert g.freqs[-1] == pytest.approx(8 * np.pi / 9)

    def test_too_short(self):
        with pytest.raises(DomainError):
            harmonic_grid(3)


class TestPeriodogram:
    def test_constant(self):
        np.testing.assert_array_equal(periodogram(np.full(64, 3.7)).ordinates, 0.0)

    def test_cosine(self):
        n = 256
        k = n // 8
        t = np.arange(1, n + 1)
        pg = periodogram(np.cos(2 * np.pi * k * t / n))
        j = np.arange(1, n // 2 + 1)
        assert pg.ordinates[k - 1] == pytest.approx(n / (8 * np.pi), rel=1e-12)
        np.testing.assert_allclose(pg.ordinates[j != k], 0.0, atol=1e-12)

    def test_white_noise_mean(self):
        x = np.sqrt(2.0) * np.random.default_rng(1).standard_normal(4096)
        assert periodogram(x).ordinates.mean() == pytest.approx(2 / (2 * np.pi), rel=0.05)

    def test_non_finite(self):
        x = np.ones(16)
        x[3] = np.nan
        with pytest.raises(DomainError):
            periodogram(x)

    @given(n=st.integers(4, 4096), seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_dual_form(self, n, seed):
        x = np.random.default_rng(seed).standard_normal(n)
        np.testing.assert_allclose(periodogram(x).ordinates, periodogram_cosine(x).ordinates,
                                   rtol=0, atol=1e-10)


class TestConstants:
    def test_u0_lam0(self):
        assert abc_constants(0.0, 0.0) == pytest.approx((0.0, 0.0, 4.0))
        w = np.linspace(0, np.pi, 17)
        np.testing.assert_allclose(abc_expression(0.0, 0.0, w), np.abs(1 + np.exp(-2j * w)) ** 2, atol=1e-14)

    def test_u1_lam0(self):
        assert abc_constants(1.0, 0.0) == pytest.approx((4.0, 8.0, 4.0))
        w = np.linspace(0, np.pi, 17)
        np.testing.assert_allclose(abc_expression(1.0, 0.0, w), np.abs(1 - np.exp(-1j * w)) ** 4, atol=1e-14)

    def test_complex_modulus(self):
        u, lam, w = 0.3, 0.5, 1.1
        z = np.exp(-(lam + 1j * w))
        ref = abs(1 - 2 * u * z + z * z) ** 2
        assert abc_expression(u, lam, w) == pytest.approx(ref, rel=1e-12)
        assert gegenbauer_factor(u, lam, w) == pytest.approx(ref, rel=1e-12)

    @given(u=st.floats(-1, 1), lam=st.floats(0, 4))
    @settings(max_examples=50, deadline=None)
    def test_factored_form_agrees(self, u, lam):
        w = np.linspace(0, np.pi, 33)
        np.testing.assert_allclose(gegenbauer_factor(u, lam, w), abc_expression(u, lam, w), rtol=1e-9, atol=1e-12)


class TestDensity:
    def test_flat_at_zero_d(self):
        spec = ModelSpec(d=0.0, lam=0.4, u=0.3, sigma2=3.0)
        np.testing.assert_allclose(spectral_density(spec, np.linspace(0, np.pi, 9)), 3 / (2 * np.pi), rtol=1e-15)

    def test_u1_is_artfima(self):
        w = np.linspace(np.pi / 1024, np.pi, 1024)
        spec = ModelSpec(d=0.2, lam=0.5, u=1.0, ar=(0.3,), ma=(0.2,), sigma2=1.7)
        np.testing.assert_allclose(spectral_density(spec, w), artfima_density(0.4, 0.5, 1.7, (0.3,), (0.2,), w),
                                   rtol=1e-12)

    def test_gegenbauer_form(self):
        w = np.linspace(0.01, np.pi, 500)
        w = w[np.abs(np.cos(w) - 0.3) > 1e-6]
        spec = ModelSpec(d=0.3, lam=0.0, u=0.3, sigma2=2.0)
        ref = 2 / (2 * np.pi) * (4 * (np.cos(w) - 0.3) ** 2) ** (-0.3)
        np.testing.assert_allclose(spectral_density(spec, w), ref, rtol=1e-12)

    def test_pole_signalled(self):
        spec = ModelSpec(d=0.3, lam=0.0, u=0.0)
        with pytest.raises(SpectralPoleError):
            spectral_density(spec, np.pi / 2)

    def test_arfima(self):
        assert arfima_density(0.25, 2 * np.pi, (), (), np.pi) == pytest.approx(2**-0.5, rel=1e-15)
        np.testing.assert_allclose(arfima_density(0.0, 1.0, (), (), [0.5, 1.0]), 1 / (2 * np.pi))
        with pytest.raises(SpectralPoleError):
            arfima_density(0.2, 1.0, (), (), 0.0)

    def test_arfima_is_gartfima_at_u1_lam0(self):
        w = np.linspace(0.01, np.pi, 256)
        spec = ModelSpec(d=0.15, lam=0.0, u=1.0, ar=(0.4,))
        np.testing.assert_allclose(arfima_density(0.3, 1.0, (0.4,), (), w), spectral_density(spec, w), rtol=1e-12)

    @given(p=params, w=st.floats(-np.pi, np.pi))
    @settings(max_examples=60, deadline=None)
    def test_even(self, p, w):
        spec = ModelSpec(d=p[0], lam=p[1] + 0.01, u=p[2], ar=(0.4,), ma=(-0.3,))
        assert spectral_density(spec, w) == spectral_density(spec, -w)

    @given(p=params, c=st.floats(0.01, 100))
    @settings(max_examples=60, deadline=None)
    def test_positive_and_scale_equivariant(self, p, c):
        spec = ModelSpec(d=p[0], lam=p[1] + 0.01, u=p[2], ar=(0.5,))
        w = np.linspace(0.001, np.pi, 64)
        f = spectral_density(spec, w)
        assert np.all(f > 0)
        np.testing.assert_allclose(spectral_density(spec.replace(sigma2=c), w), c * f, rtol=1e-14)

    @pytest.mark.parametrize("d, lam, u", [(0.4, 0.05, 0.2), (-0.3, 0.5, -0.6), (0.3, 0.4, 0.2)])
    def test_integral_is_variance(self, d, lam, u):
        spec = ModelSpec(d=d, lam=lam, u=u)
        phi = math.acos(u)
        val = 2 * quad(lambda w: spectral_density(spec, w), 0, np.pi, points=[phi], limit=400,
                       epsabs=0, epsrel=1e-12)[0]
        g0 = gartfima_core_acvf(d, lam, u, 1.0, 0).values[0]
        assert val == pytest.approx(g0, rel=1e-6)
