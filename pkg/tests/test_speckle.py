"""
Tests for speckle synthesis, compound sampling and the trace estimators.
"""

import logging
import math

import numpy as np
import pytest
from scipy import stats

from superbunch.analytics.coherence import finite_mode_g2_zero, g2_cascade, sinc
from superbunch.errors import ContractViolation, DomainError
from superbunch.speckle.fields import (
    IntensityTrace,
    cascade_intensity_trace,
    im_equivalent_trace,
    stage_intensity,
    synthesize_stage_field,
)
from superbunch.speckle.samples import sample_compound_intensity
from superbunch.speckle.statistics import (
    compound_histogram_test,
    correlate,
    first_order_correlation,
    g2_zero_estimate,
    sample_moments,
    trace_moments,
)
from superbunch.types import CascadeSpec

BANDWIDTH_1US = 2 * math.pi / 1e-6


def _normalized_second_moment(estimate):
    """<I^2>/<I>^2 and a delta-method standard error ignoring the positive covariance."""
    value = estimate.normalized(2)
    rel2 = estimate.stderr[1] / estimate.values[1]
    rel1 = estimate.stderr[0] / estimate.values[0]
    return value, value * math.sqrt(rel2**2 + 4 * rel1**2)


class TestSynthesizeStageField:
    """Tests for synthesize_stage_field() and stage_intensity()."""

    def test_single_mode_has_constant_modulus(self):
        """Test one mode gives |E|^2 = 1 everywhere."""
        intensity = stage_intensity(BANDWIDTH_1US, 2e-4, 1e-7, modes=1, seed=0)
        assert np.allclose(intensity, 1.0, rtol=0, atol=1e-12)

    def test_few_modes_warn(self, caplog):
        """Test a warning below the developed-speckle mode count."""
        with caplog.at_level(logging.WARNING, logger="superbunch"):
            synthesize_stage_field(BANDWIDTH_1US, 2e-4, 1e-7, modes=8, seed=0)
        assert "not fully developed" in caplog.text

    def test_sample_count(self):
        """Test the field has round(duration/dt) samples."""
        field = synthesize_stage_field(BANDWIDTH_1US, 1e-3, 1e-7, modes=64, seed=1)
        assert field.shape == (10_000,)
        assert field.dtype == np.complex128

    def test_deterministic(self):
        """Test the same seed reproduces the field exactly."""
        a = synthesize_stage_field(BANDWIDTH_1US, 1e-3, 1e-7, modes=64, seed=5)
        b = synthesize_stage_field(BANDWIDTH_1US, 1e-3, 1e-7, modes=64, seed=5)
        assert np.array_equal(a, b)

    def test_undersampled_rejected(self):
        """Test ContractViolation naming the bound when dt >= pi/bandwidth."""
        with pytest.raises(ContractViolation, match="pi/bandwidth"):
            synthesize_stage_field(BANDWIDTH_1US, 1e-3, 6e-7, modes=64, seed=0)

    def test_short_duration_rejected(self):
        """Test ContractViolation below 100 coherence times."""
        with pytest.raises(ContractViolation, match="coherence times"):
            synthesize_stage_field(BANDWIDTH_1US, 5e-5, 1e-7, modes=64, seed=0)

    def test_first_order_correlation_is_sinc(self):
        """Test <E(t)E*(t+tau)> follows sinc(dw tau/2) at M=1024 over 4000 tau_c."""
        field = synthesize_stage_field(BANDWIDTH_1US, 4e-3, 1e-7, modes=1024, seed=2)
        lags = np.linspace(0, 3e-6, 31)
        g1 = first_order_correlation(field, 1e-7, lags)
        expected = sinc(BANDWIDTH_1US * lags / 2)
        assert g1[0] == pytest.approx(1.0)
        assert math.sqrt(np.mean((g1.real - expected) ** 2)) < 0.05

    def test_intensity_is_negative_exponential(self):
        """Test one-stage intensity passes a KS test against the exponential law."""
        intensity = stage_intensity(BANDWIDTH_1US, 4e-3, 1e-7, modes=256, seed=3)
        thinned = intensity[::20] / intensity.mean()
        assert stats.kstest(thinned, "expon").pvalue > 0.01


class TestCascadeIntensityTrace:
    """Tests for cascade_intensity_trace() function."""

    def test_all_static_is_constant(self, two_stage_spec):
        """Test an all-static cascade gives a flat trace."""
        trace = cascade_intensity_trace(two_stage_spec.with_rotation([False, False]), 1e-3, 1e-7, seed=0,
                                        mean_intensity=3.0)
        assert np.all(trace.samples == 3.0)
        assert trace.coherence_time is None
        assert g2_zero_estimate(trace) == 1.0

    def test_stage_streams_are_independent_of_rotation(self, two_stage_spec):
        """Test the both-rotating trace is the product of the one-stage traces."""
        args = (2e-3, 1e-7, 64, 9)
        a = cascade_intensity_trace(two_stage_spec.with_rotation([False, True]), *args)
        b = cascade_intensity_trace(two_stage_spec.with_rotation([True, False]), *args)
        c = cascade_intensity_trace(two_stage_spec, *args)
        assert np.allclose(c.samples, a.samples * b.samples, rtol=1e-14)

    def test_metadata(self, two_stage_spec):
        """Test the trace records N_eff, modes and the slowest coherence time."""
        trace = cascade_intensity_trace(two_stage_spec, 1e-3, 1e-7, 64, 0)
        assert trace.metadata == {"n_effective": 2, "modes": 64}
        assert trace.coherence_time == pytest.approx(2.15e-6)
        assert trace.duration == pytest.approx(1e-3)


class TestCorrelate:
    """Tests for correlate() function."""

    def test_constant_trace_is_exactly_one(self, constant_trace):
        """Test a flat trace correlates to exactly 1 at every lag."""
        curve = correlate(constant_trace, 1e-6, 11)
        assert np.all(curve.values == 1.0)
        assert np.all(curve.stderr == 0.0)

    def test_single_stage_peak(self, single_stage_trace):
        """Test one rotating stage peaks near 2."""
        curve = correlate(single_stage_trace, 3e-6, 31)
        expected = finite_mode_g2_zero(256, 1)
        assert abs(curve.peak() - expected) < 3 * curve.stderr[np.argmin(np.abs(curve.lags))] + 1e-3

    def test_symmetric(self, single_stage_trace):
        """Test the estimator gives identical values at +tau and -tau."""
        curve = correlate(single_stage_trace, 2e-6, 21)
        assert np.array_equal(curve.values, curve.values[::-1])

    def test_two_stage_shape(self):
        """Test a two-stage trace follows the product of sinc^2 factors."""
        spec = CascadeSpec.from_bandwidths([BANDWIDTH_1US, 2 * BANDWIDTH_1US])
        trace = cascade_intensity_trace(spec, 3e-2, 5e-8, modes=256, seed=4)
        curve = correlate(trace, 5e-6, 21)
        exact = g2_cascade(curve.lags, spec)
        rms = math.sqrt(np.mean((curve.values - exact) ** 2))
        pooled = math.sqrt(np.mean(curve.stderr**2))
        assert rms < 3 * pooled
        assert rms < 0.1

    def test_deterministic(self, single_stage_trace):
        """Test values and bootstrap errors repeat for the same seed."""
        first = correlate(single_stage_trace, 2e-6, 11, seed=3)
        second = correlate(single_stage_trace, 2e-6, 11, seed=3)
        assert np.array_equal(first.values, second.values)
        assert np.array_equal(first.stderr, second.stderr)

    def test_lag_too_long(self, single_stage_trace):
        """Test ContractViolation when max_lag exceeds a tenth of the trace."""
        with pytest.raises(ContractViolation):
            correlate(single_stage_trace, 1e-3, 11)

    def test_trace_too_short(self):
        """Test ContractViolation for a trace under 100 coherence times."""
        trace = IntensityTrace(dt=1e-7, samples=np.ones(500), coherence_time=1e-6)
        with pytest.raises(ContractViolation):
            correlate(trace, 1e-6, 5)

    def test_lag_grid_collapse_warns(self, constant_trace, caplog):
        """Test a warning when requested lags round onto the same sample."""
        with caplog.at_level(logging.WARNING, logger="superbunch"):
            curve = correlate(constant_trace, 2e-8, 21, block_length=1e-6)
        assert len(curve.lags) < 21
        assert "collapsed" in caplog.text


class TestCompoundSamples:
    """Tests for sample_compound_intensity() and sample_moments()."""

    def test_two_stage_second_moment(self):
        """Test sampled <I^2> = 4 for two stages."""
        samples = sample_compound_intensity(2, 1.0, 2_000_000, seed=1)
        assert abs(samples.moment(2) - 4.0) < 3 * samples.expected_stderr(2)

    @pytest.mark.parametrize("n_stages,seed", [(3, 21), (4, 22)])
    def test_three_and_four_stage_second_moment(self, n_stages, seed):
        """Test sampled <I^2>/<I>^2 = 2^n at 1e7 samples."""
        samples = sample_compound_intensity(n_stages, 1.0, 10_000_000, seed=seed)
        assert abs(samples.normalized_moment(2) - 2.0**n_stages) < 3 * samples.expected_stderr(2)

    def test_five_stage_second_moment(self):
        """Test sampled <I^2>/<I>^2 = 32 for five stages."""
        samples = sample_compound_intensity(5, 1.0, 4_000_000, seed=2)
        assert abs(samples.normalized_moment(2) - 32.0) < 3 * samples.expected_stderr(2)

    def test_single_stage_mean(self):
        """Test the sample mean matches <I>."""
        samples = sample_compound_intensity(1, 2.0, 100_000, seed=3)
        assert abs(samples.mean() - 2.0) < 3 * 2.0 / math.sqrt(100_000)

    def test_histogram_matches_k0_density(self):
        """Test two-stage samples pass chi-square against the K0 law."""
        samples = sample_compound_intensity(2, 1.0, 1_000_000, seed=4)
        _, p_value = compound_histogram_test(samples, n_bins=50)
        assert p_value > 0.01

    def test_sample_moments(self):
        """Test sample_moments() lines up with the per-order accessors."""
        samples = sample_compound_intensity(3, 1.0, 10_000, seed=5)
        estimate = sample_moments(samples, q_max=3)
        assert estimate.orders == (1, 2, 3)
        assert estimate.values[2] == samples.moment(3)
        assert estimate.stderr[1] == samples.moment_stderr(2)

    def test_invalid_arguments(self):
        """Test DomainError for bad stage count, count or mean."""
        with pytest.raises(DomainError):
            sample_compound_intensity(0, 1.0, 10, seed=0)
        with pytest.raises(DomainError):
            sample_compound_intensity(2, 1.0, 0, seed=0)
        with pytest.raises(DomainError):
            sample_compound_intensity(2, -1.0, 10, seed=0)


class TestImEquivalentTrace:
    """Tests for im_equivalent_trace() function."""

    def test_one_modulated_stage_gives_four(self):
        """Test modulator plus one rotating stage gives <I^2>/<I>^2 near 4."""
        trace = im_equivalent_trace(1, 2e-2, 1e-7, modes=256, seed=6)
        value, error = _normalized_second_moment(trace_moments(trace, q_max=2))
        assert abs(value - 4.0) < 3 * error + 0.02

    def test_moment_table_matches_cascade(self):
        """Test one-point moments q <= 3 agree with a two-stage cascade trace."""
        im = im_equivalent_trace(1, 5e-2, 1e-7, modes=256, seed=7)
        cascade = cascade_intensity_trace(CascadeSpec.from_bandwidths([BANDWIDTH_1US] * 2), 5e-2, 1e-7, 256, seed=8)
        a = trace_moments(im, q_max=3)
        b = trace_moments(cascade, q_max=3)
        pooled = np.sqrt(a.stderr**2 + b.stderr**2)
        assert np.all(np.abs(a.values - b.values) < 3 * pooled)

    def test_short_dwell_keeps_single_stage_shape(self):
        """Test lags beyond two dwells follow one sinc^2 factor, not the cascade product."""
        im = im_equivalent_trace(1, 5e-2, 1e-7, modes=256, seed=9, bandwidth=BANDWIDTH_1US, dwell=2e-7)
        curve = correlate(im, 1e-6, 21)
        far = np.abs(curve.lags) >= 4e-7 - 1e-12
        single = 1.0 + sinc(BANDWIDTH_1US * curve.lags[far] / 2) ** 2
        cascade = g2_cascade(curve.lags[far], CascadeSpec.from_bandwidths([BANDWIDTH_1US] * 2))
        assert math.sqrt(np.mean((curve.values[far] - single) ** 2)) < 0.1
        assert math.sqrt(np.mean((curve.values[far] - cascade) ** 2)) > 0.3

    def test_dwell_metadata(self):
        """Test the dwell is rounded to whole samples and recorded."""
        trace = im_equivalent_trace(2, 1e-3, 1e-7, modes=64, seed=0, dwell=2.5e-7)
        assert trace.metadata["dwell"] == pytest.approx(2e-7)
        assert trace.metadata["n_premodulation_stages"] == 2

    def test_invalid_stage_count(self):
        """Test ContractViolation for fewer than one modulated stage."""
        with pytest.raises(ContractViolation):
            im_equivalent_trace(0, 1e-3, 1e-7)
