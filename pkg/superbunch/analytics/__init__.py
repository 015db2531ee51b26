"""Closed-form coherence curves and intensity statistics."""

from superbunch.analytics.coherence import (
    FIRST_ORDER_ENVELOPES,
    analytic_curve,
    finite_mode_g2_zero,
    g2_cascade,
    g2_single,
    g2_zero,
    lag_grid,
    sinc,
)
from superbunch.analytics.intensity import (
    MomentTable,
    bessel_k0,
    build_moment_table,
    cdf_compound,
    compound_moment_quadrature,
    expected_moment_stderr,
    moment,
    pdf_compound,
    pdf_exponential,
)

__all__ = [
    # Coherence
    "FIRST_ORDER_ENVELOPES",
    "analytic_curve",
    "finite_mode_g2_zero",
    "g2_cascade",
    "g2_single",
    "g2_zero",
    "lag_grid",
    "sinc",
    # Intensity statistics
    "MomentTable",
    "bessel_k0",
    "build_moment_table",
    "cdf_compound",
    "compound_moment_quadrature",
    "expected_moment_stderr",
    "moment",
    "pdf_compound",
    "pdf_exponential",
]
