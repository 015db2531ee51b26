"""Classical field synthesis, cascaded intensity traces and their statistics."""

from superbunch.speckle.fields import (
    IntensityTrace,
    cascade_intensity_trace,
    im_equivalent_trace,
    stage_intensity,
    synthesize_stage_field,
)
from superbunch.speckle.samples import (
    IntensitySampleSet,
    sample_compound_intensity,
)
from superbunch.speckle.statistics import (
    MomentEstimate,
    compound_histogram_test,
    correlate,
    first_order_correlation,
    g2_zero_estimate,
    sample_moments,
    trace_moments,
)

__all__ = [
    # Fields and traces
    "IntensityTrace",
    "cascade_intensity_trace",
    "im_equivalent_trace",
    "stage_intensity",
    "synthesize_stage_field",
    # Compound samples
    "IntensitySampleSet",
    "sample_compound_intensity",
    # Estimators
    "MomentEstimate",
    "compound_histogram_test",
    "correlate",
    "first_order_correlation",
    "g2_zero_estimate",
    "sample_moments",
    "trace_moments",
]
