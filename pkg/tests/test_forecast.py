"""AR(inf) weights, one-step forecasts and model comparison."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gartfima.errors import DomainError
from gartfima.estimate import FitOptions
from gartfima.forecast import compare_models, one_step_forecasts, pi_weights, split_index
from gartfima.model import ModelFamily, ModelSpec
from gartfima.simulate import SimulationConfig, gartfima_ma_weights, simulate


class TestPiWeights:
    def test_white_noise(self):
        np.testing.assert_array_equal(pi_weights(ModelSpec(), 4).values, [1, 0, 0, 0, 0])

    def test_tempered_binomial(self):
        # (1 - e^{-lam} z)^{0.4}: pi_n = Gamma(n - 0.4) / (Gamma(-0.4) n!) e^{-lam n}
        pi = pi_weights(ModelSpec(d=0.2, lam=0.5, u=1.0), 30).values
        n = np.arange(31)
        ref = np.array([math.gamma(k - 0.4) / (math.gamma(-0.4) * math.factorial(k)) for k in n]) * np.exp(-0.5 * n)
        np.testing.assert_allclose(pi, ref, rtol=1e-12)

    @given(d=st.floats(-0.45, 0.45), lam=st.floats(0.0, 2.0), u=st.floats(-1, 1))
    @settings(max_examples=50, deadline=None)
    def test_inverse_of_ma_weights(self, d, lam, u):
        m = 400
        pi = np.asarray(pi_weights(ModelSpec(d=d, lam=lam, u=u), m).values)
        psi = np.asarray(gartfima_ma_weights(ModelSpec(d=d, lam=lam, u=u), m).values)
        conv = np.convolve(pi, psi)[: m // 2 + 1]
        ident = np.zeros(m // 2 + 1)
        ident[0] = 1.0
        np.testing.assert_allclose(conv, ident, rtol=0, atol=1e-10)

    def test_arma_part(self):
        # pure ARMA(1,1): pi(z) = (1 - 0.5 z) / (1 + 0.3 z)
        pi = pi_weights(ModelSpec(ar=(0.5,), ma=(0.3,)), 3).values
        np.testing.assert_allclose(pi, [1, -0.8, 0.24, -0.072], atol=1e-15)

    def test_absolutely_summable(self):
        pi = np.abs(pi_weights(ModelSpec(d=0.4, lam=0.2, u=0.1), 2**14).values)
        assert pi[2**13:].sum() < 1e-8

    def test_not_invertible(self):
        with pytest.raises(DomainError):
            pi_weights(ModelSpec(ma=(1.2,)), 10)
        with pytest.raises(DomainError):
            pi_weights(ModelSpec(d=-0.5), 10)


class TestForecasts:
    def test_split_index(self):
        assert split_index(100, 0.75) == 75
        with pytest.raises(DomainError):
            split_index(100, 1.0)

    def test_white_noise_predicts_mean(self, rng):
        x = rng.standard_normal(200)
        rep = one_step_forecasts(ModelSpec(), x, 0.75)
        mean = x[:150].mean()
        np.testing.assert_allclose(rep.predictions, mean, rtol=0, atol=1e-15)
        assert rep.rmse == pytest.approx(math.sqrt(np.mean((x[150:] - mean) ** 2)), rel=1e-14)

    def test_rmse_identity(self, rng):
        x = simulate(ModelSpec(d=0.3, lam=0.2, u=0.4, ar=(0.3,)), SimulationConfig(300, seed=1))
        rep = one_step_forecasts(ModelSpec(d=0.3, lam=0.2, u=0.4, ar=(0.3,)), x)
        assert rep.rmse ** 2 == pytest.approx(np.mean(rep.residuals ** 2), rel=1e-15)
        assert rep.residual_mean == pytest.approx(rep.residuals.mean(), rel=1e-14)
        assert rep.split_index == 225 and rep.predictions.size == 75

    def test_ar1_explicit(self):
        x = np.sin(np.arange(60) * 0.7) + 0.1 * np.arange(60) % 3
        rep = one_step_forecasts(ModelSpec(ar=(0.6,)), x, 0.5)
        m = x[:30].mean()
        np.testing.assert_allclose(rep.predictions, m + 0.6 * (x[29:59] - m), atol=1e-13)

    def test_causality(self, rng):
        spec = ModelSpec(d=0.3, lam=0.2, u=0.4, ar=(0.5,))
        x = simulate(spec, SimulationConfig(200, seed=3))
        base = one_step_forecasts(spec, x).predictions
        t = 170  # absolute index inside the test segment
        y = x.copy()
        y[t:] += rng.standard_normal(200 - t) * 10
        moved = one_step_forecasts(spec, y).predictions
        k = 150
        np.testing.assert_array_equal(moved[: t - k + 1], base[: t - k + 1])
        assert not np.array_equal(moved[t - k + 1:], base[t - k + 1:])

    def test_innovation_variance(self):
        spec = ModelSpec(d=0.3, lam=0.3, u=0.2, ar=(0.4,), sigma2=1.7)
        x = simulate(spec, SimulationConfig(20000, seed=9))
        rep = one_step_forecasts(spec, x)
        assert rep.residual_variance == pytest.approx(1.7, rel=0.10)

    def test_too_short(self):
        with pytest.raises(DomainError):
            one_step_forecasts(ModelSpec(), np.ones(39))


class TestCompare:
    def test_single_candidate(self, rng):
        rows = compare_models(rng.standard_normal(400), [("ARMA", 0, 0)])
        assert len(rows) == 1 and not rows[0].failed

    def test_white_noise_rmse(self, rng):
        x = 1.5 * rng.standard_normal(4000)
        rows = compare_models(x, [("ARMA", 0, 0)])
        assert rows[0].rmse == pytest.approx(1.5, rel=0.05)

    def test_sorted_and_relabel_invariant(self):
        x = simulate(ModelSpec(d=0.4, lam=0.2, u=0.1, ar=(0.5,), sigma2=2.0), SimulationConfig(400, seed=6))
        opts = FitOptions(restarts=2)
        cands = [("GARTFIMA", 1, 0), ("ARMA", 1, 0), ("ARFIMA", 0, 0)]
        a = compare_models(x, cands, options=opts)
        b = compare_models(x, cands[::-1], options=opts)
        rm = [r.rmse for r in a]
        assert rm == sorted(rm)
        assert {(r.family, r.rmse) for r in a} == {(r.family, r.rmse) for r in b}

    def test_failure_recorded(self, rng):
        rows = compare_models(rng.standard_normal(100), [("ARMA", 0, 0), ("GARTFIMA", -1, 0)])
        assert rows[-1].failed and rows[-1].error and rows[0].family is ModelFamily.ARMA
        assert rows[-1].to_dict()["rmse"] is None

    def test_parallel_matches_serial(self):
        x = simulate(ModelSpec(d=0.3, lam=0.3, u=0.2), SimulationConfig(300, seed=2))
        cands = [("GARTFIMA", 0, 0), ("ARMA", 1, 0)]
        opts = FitOptions(restarts=1)
        a = compare_models(x, cands, options=opts, workers=1)
        b = compare_models(x, cands, options=opts, workers=2)
        assert [r.rmse for r in a] == [r.rmse for r in b]

    def test_empty(self):
        with pytest.raises(DomainError):
            compare_models(np.zeros(100), [])
