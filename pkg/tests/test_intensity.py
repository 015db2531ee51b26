"""
Tests for one-point intensity statistics: densities, CDFs and moments.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from superbunch.analytics.intensity import (
    bessel_k0,
    build_moment_table,
    cdf_compound,
    compound_moment_quadrature,
    expected_moment_stderr,
    moment,
    pdf_compound,
    pdf_exponential,
)
from superbunch.errors import DomainError, RangeError


class TestPdfExponential:
    """Tests for pdf_exponential() function."""

    def test_value_at_zero(self):
        """Test the density is 1/<I> at zero."""
        assert pdf_exponential(0.0, 1.0) == 1.0
        assert pdf_exponential(0.0, 4.0) == 0.25

    def test_normalized(self):
        """Test the density integrates to one."""
        total, _ = quad(lambda i: pdf_exponential(i, 2.5), 0, np.inf)
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_second_moment(self):
        """Test <I^2> = 2 <I>^2 under the density."""
        second, _ = quad(lambda i: i**2 * pdf_exponential(i, 1.5), 0, np.inf)
        assert second == pytest.approx(2 * 1.5**2, rel=1e-9)

    def test_negative_intensity_rejected(self):
        """Test DomainError for I < 0."""
        with pytest.raises(DomainError):
            pdf_exponential(-0.1, 1.0)

    def test_bad_mean_rejected(self):
        """Test DomainError for <I> <= 0."""
        with pytest.raises(DomainError):
            pdf_exponential(1.0, 0.0)


class TestBesselK0:
    """Tests for bessel_k0() function."""

    def test_reference_values(self):
        """Test K0 against tabulated values."""
        assert bessel_k0(1.0) == pytest.approx(0.4210244382, rel=1e-9)
        assert bessel_k0(10.0) == pytest.approx(1.778e-5, rel=1e-3)

    def test_integral_representation(self):
        """Test K0(x) = integral of exp(-x cosh t) over t >= 0."""
        for x in (0.3, 2.0, 5.0):
            expected, _ = quad(lambda t: math.exp(-x * math.cosh(t)), 0, np.inf)
            assert bessel_k0(x) == pytest.approx(expected, rel=1e-9)

    def test_diverges_toward_zero(self):
        """Test K0 grows monotonically as x halves."""
        xs = 1.0 / 2.0 ** np.arange(0, 30)
        values = bessel_k0(xs)
        assert np.all(np.diff(values) > 0)

    def test_non_positive_rejected(self):
        """Test DomainError for x <= 0."""
        with pytest.raises(DomainError):
            bessel_k0(0.0)


class TestPdfCompound:
    """Tests for pdf_compound() and its quadrature moments."""

    def test_single_stage_is_exponential(self):
        """Test n=1 reduces to the negative exponential."""
        intensities = np.array([0.1, 1.0, 3.0])
        assert np.allclose(pdf_compound(intensities, 2.0, 1), pdf_exponential(intensities, 2.0))

    def test_two_stage_closed_form(self):
        """Test n=2 equals (2/<I>) K0(2 sqrt(I/<I>))."""
        assert pdf_compound(0.7, 1.3, 2) == pytest.approx(2 / 1.3 * bessel_k0(2 * math.sqrt(0.7 / 1.3)), rel=1e-14)

    @pytest.mark.parametrize("n_stages", [2, 3])
    def test_normalized(self, n_stages):
        """Test the n-stage density integrates to one."""
        assert compound_moment_quadrature(0, n_stages) == pytest.approx(1.0, abs=1e-6)

    def test_two_stage_second_moment(self):
        """Test <I^2> = 4 for two stages."""
        assert compound_moment_quadrature(2, 2) == pytest.approx(4.0, rel=1e-6)

    def test_three_stage_second_moment(self):
        """Test <I^2> = 8 for three stages via nested quadrature."""
        assert compound_moment_quadrature(2, 3) == pytest.approx(8.0, abs=1e-3)

    @pytest.mark.parametrize("n_stages", [1, 2, 3])
    @pytest.mark.parametrize("q", [0, 1, 2, 3])
    def test_quadrature_moments(self, q, n_stages):
        """Test the density's q-th moment is (q!)^n for q <= 3, n <= 3."""
        expected = float(math.factorial(q) ** n_stages)
        rel = 1e-6 if n_stages < 3 else 1e-3
        assert compound_moment_quadrature(q, n_stages) == pytest.approx(expected, rel=rel)

    def test_three_stage_mixing(self):
        """Test the n=3 density equals the exponential mixture of the n=2 density."""
        r = 0.8
        expected, _ = quad(lambda x: pdf_compound(x, 1.0, 2) / x * math.exp(-r / x), 0, np.inf, limit=200)
        assert pdf_compound(r, 1.0, 3) == pytest.approx(expected, rel=1e-6)

    def test_mean_scaling(self):
        """Test P(I; <I>) = P(I/<I>; 1)/<I>."""
        assert pdf_compound(2.0, 4.0, 3) == pytest.approx(pdf_compound(0.5, 1.0, 3) / 4.0, rel=1e-12)

    def test_zero_intensity_rejected(self):
        """Test DomainError at I = 0 where the density diverges."""
        with pytest.raises(DomainError):
            pdf_compound(0.0, 1.0, 2)

    def test_zero_stages_rejected(self):
        """Test DomainError for n < 1."""
        with pytest.raises(DomainError):
            pdf_compound(1.0, 1.0, 0)


class TestCdfCompound:
    """Tests for cdf_compound() function."""

    @pytest.mark.parametrize("n_stages", [1, 2])
    def test_limits(self, n_stages):
        """Test F(0) = 0 and F(inf) = 1."""
        assert cdf_compound(0.0, 1.0, n_stages) == 0.0
        assert cdf_compound(np.inf, 1.0, n_stages) == 1.0

    @pytest.mark.parametrize("n_stages,rel", [(1, 1e-7), (2, 1e-5), (3, 1e-4)])
    def test_derivative_is_density(self, n_stages, rel):
        """Test dF/dI matches the density."""
        h = 1e-4
        for r in (0.2, 1.0, 3.0):
            slope = (cdf_compound(r + h, 1.0, n_stages) - cdf_compound(r - h, 1.0, n_stages)) / (2 * h)
            assert slope == pytest.approx(pdf_compound(r, 1.0, n_stages), rel=rel)

    def test_monotone(self):
        """Test the two-stage CDF increases."""
        values = cdf_compound(np.logspace(-3, 1.5, 60), 1.0, 2)
        assert np.all(np.diff(values) > 0)


class TestMoment:
    """Tests for moment(), expected_moment_stderr() and build_moment_table()."""

    def test_two_stage_second_moment(self):
        """Test <I^2> = 4 for n=2, <I>=1."""
        assert moment(2, 2, 1.0) == 4.0

    def test_first_moment_is_mean(self):
        """Test <I> is the mean for any stage count."""
        assert moment(1, 5, 3.5) == 3.5

    def test_third_moment(self):
        """Test <I^3> = (3!)^2 for two stages."""
        assert moment(3, 2, 1.0) == 36.0

    def test_coherent_light(self):
        """Test n=0 gives <I^q> = <I>^q."""
        assert moment(3, 0, 2.0) == 8.0

    def test_overflow(self):
        """Test RangeError when the factorial power overflows a float."""
        with pytest.raises(RangeError):
            moment(200, 5, 1.0)

    def test_order_zero_rejected(self):
        """Test DomainError for q < 1."""
        with pytest.raises(DomainError):
            moment(0, 2, 1.0)

    def test_heavy_tail_stderr(self):
        """Test the q=2 relative error is sqrt(6^n - 1)/sqrt(count)."""
        for n in (1, 2, 5):
            relative = expected_moment_stderr(2, n, 10**7) / moment(2, n, 1.0)
            assert relative == pytest.approx(math.sqrt(6**n - 1) / math.sqrt(1e7), rel=1e-12)

    def test_table(self):
        """Test the moment ladder holds 2^n at q=2."""
        table = build_moment_table(2.0, q_max=3, n_max=5)
        for n in range(6):
            assert table.normalized(2, n) == pytest.approx(2.0**n)
        assert table[(1, 4)] == 2.0
        assert len(table.entries) == 3 * 6
