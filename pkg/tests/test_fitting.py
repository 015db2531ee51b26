"""
Tests for the sinc^2 product fits and the product-curve comparison.
"""

import math

import numpy as np
import pytest

from superbunch.analytics.coherence import analytic_curve, lag_grid
from superbunch.errors import ContractViolation, FitError
from superbunch.fitting.models import fit_g2, g2_model, model_factors
from superbunch.fitting.product import product_curve_check
from superbunch.types import CascadeSpec, G2Curve


def _model_curve(amplitudes, coherence_times, span=3.0, n_lags=61, noise=0.0, seed=0):
    """Curve drawn from the model itself, optionally with Gaussian noise of known stderr."""
    bandwidths = [2 * math.pi / t for t in coherence_times]
    lags = np.linspace(-span * max(coherence_times), span * max(coherence_times), n_lags)
    values = g2_model(lags, amplitudes, bandwidths)
    if noise:
        values = values + np.random.default_rng(seed).normal(0.0, noise, size=n_lags)
        return G2Curve(lags, values, np.full(n_lags, noise))
    return G2Curve(lags, values)


class TestModelFactors:
    """Tests for model_factors() function."""

    def test_known_models(self):
        """Test single and product-N identifiers."""
        assert model_factors("single") == 1
        assert model_factors("product-2") == 2
        assert model_factors("product-4") == 4

    @pytest.mark.parametrize("model", ["double", "product-0", "product-x", ""])
    def test_unknown_models(self, model):
        """Test ContractViolation for unrecognized identifiers."""
        with pytest.raises(ContractViolation):
            model_factors(model)


class TestFitG2:
    """Tests for fit_g2() function."""

    @pytest.mark.parametrize("beta,tau_c", [(1.0, 1e-6), (0.5, 2.15e-6), (0.8, 5e-7)])
    def test_single_round_trip(self, beta, tau_c):
        """Test a noiseless single-factor curve returns its own parameters."""
        fit = fit_g2(_model_curve([beta], [tau_c]), model="single")
        assert fit.amplitudes[0] == pytest.approx(beta, abs=1e-4)
        assert fit.coherence_times[0] == pytest.approx(tau_c, rel=1e-4)
        assert fit.g2_zero == pytest.approx(1 + beta, abs=1e-4)
        assert not fit.weighted

    def test_product_round_trip(self):
        """Test a noiseless two-factor curve gives g2(0) = 4 and both coherence times."""
        fit = fit_g2(_model_curve([1.0, 1.0], [2.15e-6, 1.08e-6]), model="product-2")
        assert fit.g2_zero == pytest.approx(4.0, abs=1e-4)
        assert fit.bandwidths[0] > fit.bandwidths[1]
        assert fit.coherence_times == pytest.approx((1.08e-6, 2.15e-6), rel=1e-4)

    def test_noisy_fit_covers_truth(self):
        """Test a weighted fit of noisy data brackets the true peak."""
        fit = fit_g2(_model_curve([1.0], [1e-6], noise=0.02, seed=4), model="single")
        assert fit.weighted
        assert fit.g2_zero_stderr > 0
        assert abs(fit.g2_zero - 2.0) < 4 * fit.g2_zero_stderr

    def test_analytic_curve_fit(self, two_stage_spec):
        """Test the exact two-stage curve fits to four with product-2."""
        curve = analytic_curve(two_stage_spec, lag_grid(two_stage_spec, 81, 3.0))
        fit = fit_g2(curve, model="product-2")
        assert fit.g2_zero == pytest.approx(4.0, abs=1e-4)

    def test_interval(self):
        """Test the 95% interval is centered and 1.96 stderr wide on each side."""
        fit = fit_g2(_model_curve([1.0], [1e-6], noise=0.02, seed=5), model="single")
        low, high = fit.g2_zero_interval()
        assert (low + high) / 2 == pytest.approx(fit.g2_zero)
        assert high - fit.g2_zero == pytest.approx(1.959964 * fit.g2_zero_stderr, rel=1e-5)

    def test_initial_guess(self):
        """Test an explicit guess in rad/s is accepted."""
        fit = fit_g2(_model_curve([1.0], [1e-6]), initial_guess=[0.9, 2 * math.pi / 1.1e-6])
        assert fit.g2_zero == pytest.approx(2.0, abs=1e-4)

    def test_initial_guess_wrong_shape(self):
        """Test ContractViolation for a guess with the wrong parameter count."""
        with pytest.raises(ContractViolation):
            fit_g2(_model_curve([1.0], [1e-6]), model="product-2", initial_guess=[1.0, 1e6])

    def test_too_few_points(self):
        """Test ContractViolation below ten points."""
        with pytest.raises(ContractViolation):
            fit_g2(_model_curve([1.0], [1e-6], n_lags=9))

    def test_constant_curve(self):
        """Test FitError for a curve with no structure."""
        curve = G2Curve(np.linspace(-1e-6, 1e-6, 21), np.ones(21))
        with pytest.raises(FitError):
            fit_g2(curve)

    def test_to_dict(self):
        """Test the serialized result lists parameters in SI units."""
        data = fit_g2(_model_curve([1.0], [1e-6])).to_dict()
        assert data["model"] == "single"
        assert data["coherence_times_s"][0] == pytest.approx(1e-6, rel=1e-4)
        assert set(data) >= {"g2_zero", "g2_zero_stderr", "amplitudes", "bandwidths_rad_s"}


class TestFitProperties:
    """Round-trip, scale and null properties of fit_g2()."""

    def test_well_separated_product(self):
        """Test a product-2 curve with one band five times the other recovers both bandwidths."""
        slow = 2 * math.pi / 2e-6
        curve = _model_curve([1.0, 1.0], [2e-6 / 5, 2e-6], n_lags=201)
        fit = fit_g2(curve, model="product-2")
        assert fit.bandwidths == pytest.approx((5 * slow, slow), rel=1e-4)
        assert fit.amplitudes == pytest.approx((1.0, 1.0), rel=1e-4)

    def test_random_round_trips(self):
        """Test 100 random product-2 curves in the valid box all fit back to their parameters."""
        rng = np.random.default_rng(15)
        for _ in range(100):
            amplitudes = rng.uniform(0.2, 1.5, size=2)
            # bands at least 25% apart and at most 20x
            ratio = math.exp(rng.uniform(math.log(1.25), math.log(20.0)))
            slow_tau = rng.uniform(5e-7, 5e-6)
            curve = _model_curve(amplitudes, [slow_tau / ratio, slow_tau], n_lags=601)
            fit = fit_g2(curve, model="product-2")
            assert fit.amplitudes == pytest.approx(tuple(amplitudes), rel=1e-4)
            assert fit.coherence_times == pytest.approx((slow_tau / ratio, slow_tau), rel=1e-4)

    def test_scale_consistent(self):
        """Test scaling lags by s and guesses by 1/s leaves amplitudes and residuals unchanged."""
        curve = _model_curve([0.9, 0.7], [1e-6, 2.5e-6], noise=0.01, seed=16)
        guess = [1.0, 1.0, 2 * math.pi / 1e-6, 2 * math.pi / 2.5e-6]
        base = fit_g2(curve, model="product-2", initial_guess=guess)
        s = 1000.0
        stretched = G2Curve(curve.lags * s, curve.values, curve.stderr)
        scaled_guess = guess[:2] + [bw / s for bw in guess[2:]]
        scaled = fit_g2(stretched, model="product-2", initial_guess=scaled_guess)
        assert scaled.amplitudes == pytest.approx(base.amplitudes, rel=1e-6)
        assert scaled.residual_rms == pytest.approx(base.residual_rms, rel=1e-6)
        assert [bw * s for bw in scaled.bandwidths] == pytest.approx(list(base.bandwidths), rel=1e-6)

    def test_flat_noise_has_no_bunching(self):
        """Test pure noise around 1 fits to an amplitude consistent with zero."""
        lags = np.linspace(-5e-6, 5e-6, 101)
        values = 1.0 + np.random.default_rng(17).normal(0.0, 0.01, size=101)
        fit = fit_g2(G2Curve(lags, values, np.full(101, 0.01)), model="single")
        assert abs(fit.amplitudes[0]) <= 3 * fit.amplitude_stderr[0]


class TestProductCurveCheck:
    """Tests for product_curve_check() function."""

    def _scenario_curves(self, spec, n_lags=61):
        lags = lag_grid(spec, n_lags, 3.0)
        return (
            analytic_curve(spec.with_rotation([False, True]), lags),
            analytic_curve(spec.with_rotation([True, False]), lags),
            analytic_curve(spec, lags),
        )

    def test_exact_curves_close(self, two_stage_spec):
        """Test exact single-stage curves multiply to the exact two-stage curve."""
        a, b, ab = self._scenario_curves(two_stage_spec)
        check = product_curve_check(a, b, ab)
        assert check.rms_gap < 1e-12
        assert check.report["source"] == "curves"
        assert check.report["points"] == 61

    def test_fitted_product(self, two_stage_spec):
        """Test fitted single-stage models multiply to the two-stage curve."""
        a, b, ab = self._scenario_curves(two_stage_spec)
        check = product_curve_check(a, b, ab, fit_a=fit_g2(a), fit_b=fit_g2(b))
        assert check.rms_gap < 1e-4
        assert check.report["source"] == "fits"

    def test_narrower_curve_flagged(self, two_stage_spec):
        """Test a two-stage curve narrower than the product is reported as such."""
        a, b, _ = self._scenario_curves(two_stage_spec)
        bandwidths = [s.bandwidth * 1.3 for s in two_stage_spec.stages]
        values = g2_model(a.lags, [1.0, 1.0], bandwidths)
        ab = G2Curve(a.lags, values, np.full(len(values), 0.01))
        check = product_curve_check(a, b, ab)
        assert check.report["sign_pattern"] == "narrower than product"
        assert check.rms_gap > 3 * check.pooled_stderr

    def test_grids_reconciled(self, two_stage_spec):
        """Test differing grids are interpolated onto the two-stage lags in the common range."""
        a, b, _ = self._scenario_curves(two_stage_spec, n_lags=201)
        ab = analytic_curve(two_stage_spec, lag_grid(two_stage_spec, 31, 2.0))
        check = product_curve_check(a, b, ab)
        assert np.array_equal(check.lags, ab.lags)
        assert check.rms_gap < 0.05

    def test_disjoint_ranges(self):
        """Test ContractViolation when the lag ranges do not overlap."""
        left = G2Curve(np.linspace(-2e-6, -1e-6, 11), np.ones(11))
        right = G2Curve(np.linspace(1e-6, 2e-6, 11), np.ones(11))
        with pytest.raises(ContractViolation):
            product_curve_check(left, left, right)
